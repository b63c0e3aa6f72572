"""Command-line front end: ``twostat {sweep,bsarray,verify,hom}``.

Every command writes CSV (``#`` metadata lines, one header row, ``\\n`` line
endings, 12 significant digits) to ``--out`` or stdout.  Exit codes: 0 on
success, 1 on verification or I/O failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import verify as verify_mod
from .dephasing import (DEFAULT_MAX_STEPS, DEFAULT_TOLERANCE, SectorDistribution,
                        iterate_to_equilibrium)
from .density import DensityMatrix
from .fock_basis import MAX_LEVELS, Statistics, build_basis
from .scattering import coincidence_after_splitter, lift_two_particle, make_beam_splitter
from .thermal import (LevelSpectrum, beta_from_kt, grid, p11_analytic, p11_numeric,
                      p11_product_injection_limit, product_injection_matrix, required_truncation,
                      thermal_sector_injection_matrix)

INJECTIONS = {"pure": "pure_pq", "product": "product_boltzmann", "thermal": "thermal_sector"}


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value == 0:
        return "0"  # folds -0.0
    return f"{value:.12g}"


def csv_line(fields: Iterable) -> str:
    return ",".join(fmt(f) for f in fields) + "\n"


@dataclass(frozen=True)
class SweepConfig:
    statistics: tuple[Statistics, ...] = (Statistics.BOSON, Statistics.FERMION)
    kt_over_delta_min: float = 0.01
    kt_over_delta_max: float = 10.0
    points: int = 200
    grid: str = "log"
    truncation_tol: float = 1e-12
    out: str = "-"

    def __post_init__(self):
        lo, hi = self.kt_over_delta_min, self.kt_over_delta_max
        if not (lo > 0 and hi > 0 and math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("kT/Delta bounds must be positive and finite")
        if self.points < 1:
            raise ValueError("points must be >= 1")
        if self.points == 1 and lo != hi:
            raise ValueError("a single-point sweep needs --kt-min equal to --kt-max")
        if self.points >= 2 and not lo < hi:
            raise ValueError("--kt-min must be smaller than --kt-max")
        if self.grid not in ("log", "linear"):
            raise ValueError(f"unknown grid {self.grid!r}")
        if not 0 < self.truncation_tol < 1:
            raise ValueError("truncation tolerance must lie in (0, 1)")

    def temperatures(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.kt_over_delta_min])
        return np.asarray(grid(self.kt_over_delta_min, self.kt_over_delta_max, self.points, self.grid))


def sweep_row(statistics: Statistics, kt: float, tol: float) -> list:
    bd = beta_from_kt(kt)
    levels = required_truncation(bd, tol)
    exact = p11_analytic(bd, statistics)
    numeric = p11_numeric(LevelSpectrum.equally_spaced(levels), bd, statistics)
    return [statistics.value, kt, exact, numeric, levels, abs(numeric - exact)]


def run_sweep(config: SweepConfig) -> str:
    jobs = [(s, float(kt)) for s in config.statistics for kt in config.temperatures()]
    with ThreadPoolExecutor() as pool:
        # map keeps grid order regardless of completion order
        rows = list(pool.map(lambda job: sweep_row(*job, config.truncation_tol), jobs))
    buf = io.StringIO(newline="")
    buf.write("# two-particle coincidence probability P(1,1) versus kT/Delta\n")
    buf.write("# closed form for the infinite equally spaced ladder vs truncated-ladder partition sums\n")
    buf.write(f"# grid={config.grid} points={config.points} truncation_tol={fmt(config.truncation_tol)}\n")
    buf.write(csv_line(["statistics", "kt_over_delta", "p11_analytic", "p11_numeric",
                        "truncation_L", "abs_err"]))
    for row in rows:
        buf.write(csv_line(row))
    return buf.getvalue()


@dataclass(frozen=True)
class ArrayConfig:
    statistics: Statistics = Statistics.BOSON
    levels: int = 1
    theta: float = math.pi / 4
    phase: float = 0.0
    beta_delta: float = math.inf
    injection: str = "pure_pq"
    max_steps: int = DEFAULT_MAX_STEPS
    tolerance: float = DEFAULT_TOLERANCE
    out: str = "-"

    def __post_init__(self):
        if not 1 <= self.levels <= MAX_LEVELS:
            raise ValueError(f"--levels must lie in [1, {MAX_LEVELS}]")
        if not self.tolerance > 0:
            raise ValueError("--tol must be positive")
        if self.max_steps < 1:
            raise ValueError("--max-steps must be >= 1")
        if math.isnan(self.beta_delta) or self.beta_delta < 0:
            raise ValueError("--beta-delta must be >= 0 (inf for T = 0)")
        if self.injection not in INJECTIONS.values():
            raise ValueError(f"unknown injection {self.injection!r}")


def initial_state(config: ArrayConfig, basis) -> DensityMatrix:
    spectrum = LevelSpectrum.equally_spaced(config.levels)
    if config.injection == "pure_pq":
        # ground level at both sites
        return DensityMatrix.basis_state(basis, 0, 1)
    if config.injection == "product_boltzmann":
        return product_injection_matrix(basis, spectrum, config.beta_delta)
    return thermal_sector_injection_matrix(basis, spectrum, config.beta_delta)


def run_bsarray(config: ArrayConfig, err=None) -> str:
    err = err if err is not None else sys.stderr
    basis = build_basis(config.statistics, config.levels)
    splitter = make_beam_splitter(config.theta, config.phase)
    u = lift_two_particle(splitter, basis)
    traj = iterate_to_equilibrium(initial_state(config, basis), u, config.max_steps, config.tolerance)
    if traj.diagnostic:
        print(f"warning: {traj.diagnostic}", file=err)

    with_abc = config.statistics is Statistics.BOSON and config.levels == 1
    buf = io.StringIO(newline="")
    buf.write("# dephased beam-splitter array: per-step coincidence probability and entropy\n")
    buf.write(f"# statistics={config.statistics.value} levels={config.levels} theta={fmt(config.theta)} "
              f"phase={fmt(config.phase)} R={fmt(splitter.R)} T={fmt(splitter.T)} "
              f"beta_delta={fmt(config.beta_delta)} injection={config.injection}\n")
    header = ["step", "p11", "entropy", "max_delta"] + (["a", "b", "c"] if with_abc else [])
    buf.write(csv_line(header))
    sectors = traj.sectors() if with_abc else [None] * len(traj.records)
    for rec, sec in zip(traj.records, sectors):
        row = [rec.step, rec.p11, rec.entropy, rec.max_delta]
        if sec is not None:
            row += [sec.a, sec.b, sec.c]
        buf.write(csv_line(row))
    steps = "" if traj.steps_to_converge is None else traj.steps_to_converge
    buf.write(f"# converged={fmt(traj.converged)} steps_to_converge={steps}\n")
    buf.write(reference_line(config) + "\n")
    return buf.getvalue()


def reference_line(config: ArrayConfig) -> str:
    """Expected long-run P(1,1): the truncated ladder actually simulated and the infinite ladder."""
    bd, stats = config.beta_delta, config.statistics
    if config.injection == "product_boltzmann":
        return f"# reference product_injection_limit_infinite_ladder={fmt(p11_product_injection_limit(bd, stats))}"
    if config.injection == "thermal_sector":
        truncated = p11_numeric(LevelSpectrum.equally_spaced(config.levels), bd, stats)
        return (f"# reference p11_truncated_ladder={fmt(truncated)} "
                f"p11_infinite_ladder={fmt(p11_analytic(bd, stats))}")
    # pure injection puts everything in the ground-level sector
    return f"# reference p11_ground_sector={fmt(1 / 3 if stats is Statistics.BOSON else 1.0)}"


def run_hom(theta: float, phase: float, statistics: Statistics) -> str:
    splitter = make_beam_splitter(theta, phase)
    closed = (splitter.R - splitter.T) ** 2 if statistics is Statistics.BOSON else 1.0
    buf = io.StringIO(newline="")
    buf.write("# single beam splitter, one particle entering at each port (Hong-Ou-Mandel)\n")
    buf.write(csv_line(["statistics", "theta", "phase", "R", "T", "coincidence", "closed_form"]))
    buf.write(csv_line([statistics.value, theta, phase, splitter.R, splitter.T,
                        coincidence_after_splitter(splitter, statistics), closed]))
    return buf.getvalue()


def write_output(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twostat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="P(1,1) versus kT/Delta, closed form and truncated ladder")
    p.add_argument("--stats", choices=["boson", "fermion", "both"], default="both")
    p.add_argument("--kt-min", type=_float, default=0.01)
    p.add_argument("--kt-max", type=_float, default=10.0)
    p.add_argument("--points", type=_positive_int, default=200)
    p.add_argument("--grid", choices=["log", "linear"], default="log")
    p.add_argument("--tol", type=_float, default=1e-12, help="ladder truncation tolerance")
    p.add_argument("--out", default="-")

    p = sub.add_parser("bsarray", help="iterate a dephased beam-splitter array")
    p.add_argument("--stats", choices=["boson", "fermion"], default="boson")
    p.add_argument("--levels", type=_positive_int, default=1)
    p.add_argument("--theta", type=_float, default=math.pi / 4)
    p.add_argument("--phase", type=_float, default=0.0)
    p.add_argument("--beta-delta", type=_float, default=math.inf, help="Delta/kT; inf means T = 0")
    p.add_argument("--injection", choices=list(INJECTIONS), default="pure")
    p.add_argument("--tol", type=_float, default=DEFAULT_TOLERANCE)
    p.add_argument("--max-steps", type=_positive_int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--out", default="-")

    p = sub.add_parser("verify", help="randomized checks of the commutation and invariance theorems")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--draws", type=_positive_int, default=100)
    p.add_argument("--corrupt", action="store_true",
                   help="negative control: plant an off-sector element in every lift")
    p.add_argument("--out", default="-")

    p = sub.add_parser("hom", help="single-splitter coincidence probability")
    p.add_argument("--theta", type=_float, default=math.pi / 4)
    p.add_argument("--phase", type=_float, default=0.0)
    p.add_argument("--stats", choices=["boson", "fermion"], default="boson")
    p.add_argument("--out", default="-")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    status = 0
    try:
        if args.command == "sweep":
            stats = (tuple(Statistics) if args.stats == "both" else (Statistics.parse(args.stats),))
            config = SweepConfig(stats, args.kt_min, args.kt_max, args.points, args.grid, args.tol, args.out)
            text = run_sweep(config)
        elif args.command == "bsarray":
            config = ArrayConfig(Statistics.parse(args.stats), args.levels, args.theta, args.phase,
                                 args.beta_delta, INJECTIONS[args.injection], args.max_steps,
                                 args.tol, args.out)
            text = run_bsarray(config)
        elif args.command == "verify":
            report = verify_mod.run_all(args.seed, args.draws, corrupt=args.corrupt)
            text = report.to_text()
            status = 0 if report.passed else 1
        else:
            text = run_hom(args.theta, args.phase, Statistics.parse(args.stats))
    except ValueError as exc:
        with contextlib.suppress(SystemExit):
            parser.error(str(exc))
        return 2

    try:
        write_output(text, args.out)
    except OSError as exc:
        print(f"twostat: cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    return status


if __name__ == "__main__":
    sys.exit(main())
