"""Finite-temperature end point of the dephased array for two injection schemes.

``thermal``: each level sector enters with its equilibrium weight, so the array
relaxes to the Gibbs state.  ``product``: each particle carries an independent
Boltzmann level, which the level-conserving splitters never redistribute.
The two long-run coincidence probabilities differ at intermediate kT/Delta.
The thermal column is compared with the 40-level ladder it actually simulates
as well as with the infinite-ladder closed form.
"""

import math

import numpy as np

from twostat import (LevelSpectrum, build_basis, iterate_to_equilibrium, lift_two_particle,
                     make_beam_splitter, p11_analytic, p11_numeric, p11_of_rho, p11_product_injection_limit,
                     product_injection_matrix, thermal_sector_injection_matrix)

LEVELS = 40


def main():
    spectrum = LevelSpectrum.equally_spaced(LEVELS)
    splitter = make_beam_splitter(math.pi / 4)
    print("statistics,beta_delta,thermal_array,truncated_ladder,closed_form,product_array,product_limit")
    for stats in ("boson", "fermion"):
        basis = build_basis(stats, LEVELS)
        u = lift_two_particle(splitter, basis)
        for bd in np.geomspace(0.5, 8, 6):
            thermal = iterate_to_equilibrium(thermal_sector_injection_matrix(basis, spectrum, bd), u)
            product = iterate_to_equilibrium(product_injection_matrix(basis, spectrum, bd), u)
            print(f"{stats},{bd:.6g},{p11_of_rho(thermal.final):.10f},"
                  f"{p11_numeric(spectrum, bd, stats):.10f},{p11_analytic(bd, stats):.10f},"
                  f"{p11_of_rho(product.final):.10f},{p11_product_injection_limit(bd, stats):.10f}")


if __name__ == "__main__":
    main()
