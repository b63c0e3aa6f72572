"""Coincidence probability P(1,1) against kT/Delta for bosons and fermions.

Writes a CSV with the closed-form curve next to the truncated-ladder value,
ready for any plotting tool:

    python3 scripts/coincidence_transition.py --out transition.csv
"""

import argparse

from twostat.cli import SweepConfig, run_sweep, write_output


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=200)
    parser.add_argument("--out", default="-")
    args = parser.parse_args()
    write_output(run_sweep(SweepConfig(points=args.points)), args.out)


if __name__ == "__main__":
    main()
