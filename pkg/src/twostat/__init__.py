"""Equilibrium statistics of two identical particles and a dephased
Hong-Ou-Mandel style beam-splitter array."""

from .dephasing import (SectorDistribution, Trajectory, dephase, iterate_to_equilibrium,
                        p11_of_rho, recursion_ratios, step, transfer_matrix_3,
                        von_neumann_entropy)
from .density import BasisMismatchError, DensityMatrix
from .fock_basis import (Mode, Site, Statistics, TwoParticleBasis, TwoParticleState,
                         build_basis, site_occupation, state_energy)
from .scattering import (BeamSplitter, HamiltonianMatrix, TwoParticleUnitary, apply_unitary,
                         commutator_residual, compose, hamiltonian_matrix, lift_two_particle,
                         make_beam_splitter, separation_invariance_residual)
from .thermal import (LevelSpectrum, PartitionTerms, p11_analytic, p11_numeric,
                      p11_product_injection_limit, product_injection_matrix,
                      required_truncation, single_particle_sum, thermal_density_matrix,
                      thermal_sector_injection_matrix, z_pq, z_same_site)

__version__ = "0.1.0"
