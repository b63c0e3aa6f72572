"""Beam splitters and their action on two identical particles.

A splitter mixes the two sites of every internal level with the same 2x2
unitary ``S = [[r, t'], [t, r']]``; creation operators map as
``c†_{b,n} -> sum_a S[a, b] c†_{a,n}``.  The two-particle operator is built
by expanding ``c†_{m1} c†_{m2}`` under that map and re-collecting canonical
terms, which is where the bosonic sqrt(2) and the fermionic exchange sign
enter.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .density import BasisMismatchError, DensityMatrix, max_abs
from .fock_basis import Statistics, TwoParticleBasis, build_basis
from .thermal import LevelSpectrum, thermal_density_matrix

UNITARY_TOL = 1e-12


@dataclass(frozen=True)
class BeamSplitter:
    r: complex
    t: complex
    r_prime: complex
    t_prime: complex

    def __post_init__(self):
        dev = np.abs(self.matrix.conj().T @ self.matrix - np.eye(2)).max()
        if dev > UNITARY_TOL:
            raise ValueError(f"beam splitter is not unitary (|S^dag S - I| = {dev:.3g})")

    @classmethod
    def from_matrix(cls, s) -> "BeamSplitter":
        s = np.asarray(s, dtype=complex)
        if s.shape != (2, 2):
            raise ValueError(f"beam splitter matrix must be 2x2, got {s.shape}")
        return cls(s[0, 0], s[1, 0], s[1, 1], s[0, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.r, self.t_prime], [self.t, self.r_prime]], dtype=complex)

    @property
    def R(self) -> float:
        return abs(self.r) ** 2

    @property
    def T(self) -> float:
        return abs(self.t) ** 2

    def mode_matrix(self, levels: int) -> np.ndarray:
        """Single-particle unitary on all 2L modes (level-major ordering)."""
        return np.kron(np.eye(levels), self.matrix)


def make_beam_splitter(theta: float, phase: float = 0.0) -> BeamSplitter:
    """``[[cos th, i e^{i phi} sin th], [i e^{-i phi} sin th, cos th]]``; R = cos^2 th."""
    c, s = math.cos(theta), math.sin(theta)
    return BeamSplitter(r=complex(c), t=1j * cmath.exp(-1j * phase) * s,
                        r_prime=complex(c), t_prime=1j * cmath.exp(1j * phase) * s)


@dataclass(frozen=True, eq=False)
class TwoParticleUnitary:
    basis: TwoParticleBasis
    matrix: sp.csr_array
    splitter: BeamSplitter | None = None

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def unitarity_residual(self) -> float:
        n = self.basis.dimension
        return max_abs(self.matrix.conj().T @ self.matrix - sp.eye_array(n, format="csr"))

    def __matmul__(self, other: "TwoParticleUnitary") -> "TwoParticleUnitary":
        _same_basis(self.basis, other.basis)
        return TwoParticleUnitary(self.basis, (self.matrix @ other.matrix).tocsr())


def _same_basis(a: TwoParticleBasis, b: TwoParticleBasis) -> None:
    if a is not b and (a.statistics, a.levels) != (b.statistics, b.levels):
        raise BasisMismatchError(
            f"basis mismatch: {a.statistics.value}/L={a.levels} vs {b.statistics.value}/L={b.levels}")


def lift_two_particle(splitter: BeamSplitter, basis: TwoParticleBasis) -> TwoParticleUnitary:
    s = splitter.matrix
    sign = 1.0 if basis.statistics is Statistics.BOSON else -1.0
    rows, cols, vals = [], [], []
    for col, state in enumerate(basis.states):
        # c†_{m1} c†_{m2} -> sum_{k,l} S[k,m1] S[l,m2] c†_k c†_l, collected canonically
        terms: dict[tuple[int, int], complex] = {}
        n1, n2 = state.levels
        a1, a2 = state.m1 % 2, state.m2 % 2
        for b1 in (0, 1):
            for b2 in (0, 1):
                amp = s[b1, a1] * s[b2, a2]
                if amp == 0:
                    continue
                k, l = 2 * n1 + b1, 2 * n2 + b2
                if k == l:
                    if sign < 0:
                        continue  # c†_k c†_k = 0 for fermions
                    terms[(k, k)] = terms.get((k, k), 0) + amp
                elif k < l:
                    terms[(k, l)] = terms.get((k, l), 0) + amp
                else:
                    terms[(l, k)] = terms.get((l, k), 0) + sign * amp
        for (k, l), amp in terms.items():
            # (c†_k)^2 |0> = sqrt(2) |kk>; input normalisation stored on the state
            out_norm = math.sqrt(2.0) if k == l else 1.0
            value = state.norm * out_norm * amp
            if value != 0:
                rows.append(basis.index(k, l))
                cols.append(col)
                vals.append(value)
    n = basis.dimension
    mat = sp.coo_array((np.asarray(vals, dtype=complex), (rows, cols)), shape=(n, n)).tocsr()
    mat.sum_duplicates()
    return TwoParticleUnitary(basis, mat, splitter)


def compose(unitaries: Sequence[TwoParticleUnitary]) -> TwoParticleUnitary:
    """Product applying ``unitaries[0]`` first."""
    if not unitaries:
        raise ValueError("need at least one unitary")
    out = unitaries[0]
    for u in unitaries[1:]:
        out = u @ out
    return out


def apply_unitary(u: TwoParticleUnitary, rho: DensityMatrix) -> DensityMatrix:
    rho.require_same_basis(u.basis)
    out = (u.matrix @ rho.matrix @ u.matrix.conj().T).tocsr()
    return DensityMatrix(rho.basis, out, check=False)


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    basis: TwoParticleBasis
    energies: np.ndarray

    @property
    def matrix(self) -> sp.csr_array:
        return sp.diags_array(self.energies.astype(complex), format="csr")


def hamiltonian_matrix(basis: TwoParticleBasis, spectrum: LevelSpectrum) -> HamiltonianMatrix:
    if basis.levels != spectrum.levels:
        raise ValueError(f"basis has {basis.levels} levels, spectrum has {spectrum.levels}")
    return HamiltonianMatrix(basis, basis.energies(spectrum))


def commutator_residual(h: HamiltonianMatrix, u: TwoParticleUnitary) -> float:
    """max |(HU - UH)_ij|; zero whenever U never links states of different energy."""
    _same_basis(h.basis, u.basis)
    hm = h.matrix
    return max_abs(hm @ u.matrix - u.matrix @ hm)


def invariance_residual(rho: DensityMatrix, u: TwoParticleUnitary) -> float:
    """max |(U rho U^dag - rho)_ij|."""
    return max_abs(apply_unitary(u, rho).matrix - rho.matrix)


def separation_invariance_residual(spectrum: LevelSpectrum, beta: float,
                                   statistics: Statistics | str,
                                   splitter: BeamSplitter | Iterable[BeamSplitter]) -> float:
    """Residual of separating a thermal pair with one splitter or a chain of them."""
    basis = build_basis(statistics, spectrum.levels)
    splitters = [splitter] if isinstance(splitter, BeamSplitter) else list(splitter)
    u = compose([lift_two_particle(s, basis) for s in splitters])
    return invariance_residual(thermal_density_matrix(basis, spectrum, beta), u)


def corrupt_lift(u: TwoParticleUnitary, spectrum: LevelSpectrum, value: float = 0.1) -> TwoParticleUnitary:
    """Negative control: plant ``value`` on an element linking two level sectors.

    The pair is chosen with the largest energy gap so the commutator residual
    becomes ``value * gap``.  Needs at least two levels with distinct energies.
    """
    energies = u.basis.energies(spectrum)
    lo, hi = int(np.argmin(energies)), int(np.argmax(energies))
    if energies[hi] == energies[lo] or u.basis[lo].sector == u.basis[hi].sector:
        raise ValueError("corrupting a lift needs two sectors with different energies")
    mat = u.matrix.tolil()
    mat[hi, lo] = value
    return TwoParticleUnitary(u.basis, sp.csr_array(mat.tocsr()), u.splitter)


def coincidence_after_splitter(splitter: BeamSplitter, statistics: Statistics | str) -> float:
    """P(1,1) after one splitter for a single-level pair entering at p and q."""
    basis = build_basis(statistics, 1)
    u = lift_two_particle(splitter, basis)
    rho = apply_unitary(u, DensityMatrix.basis_state(basis, 0, 1))
    return float(rho.diagonal()[basis.coincidence_mask()].sum())
