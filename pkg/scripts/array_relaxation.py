"""Relaxation of a two-boson pair through a dephased beam-splitter array.

For several reflectivities, prints how many array elements are needed before
the (|pp>, |qq>, |pq>) weights settle at 1/3 each, next to the bound set by the
slower of the two geometric decay factors.  Starting from |pq> leaves a - b at
zero, so away from R = 1/2 the observed count undercuts the bound.
"""

import math

from twostat import (DensityMatrix, build_basis, iterate_to_equilibrium, lift_two_particle,
                     make_beam_splitter, recursion_ratios)


def main():
    basis = build_basis("boson", 1)
    start = DensityMatrix.basis_state(basis, 0, 1)
    print("R,steps_observed,steps_bound,final_p11,final_entropy")
    for R in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9):
        splitter = make_beam_splitter(math.acos(math.sqrt(R)))
        traj = iterate_to_equilibrium(start, lift_two_particle(splitter, basis), tolerance=1e-12)
        slowest = max(abs(r) for r in recursion_ratios(splitter.R, splitter.T))
        bound = math.ceil(12 * math.log(10) / -math.log(slowest))
        print(f"{R:.1f},{traj.steps_to_converge},{bound},"
              f"{traj.p11[-1]:.12f},{traj.entropy[-1]:.12f}")


if __name__ == "__main__":
    main()
