"""Seeded randomized checks behind ``twostat verify``.

Each suite draws random parameters, computes a residual per draw and keeps the
worst one.  A suite fails when its worst residual exceeds ``THRESHOLD``; the
offending draw's parameters are kept so the failure can be reproduced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dephasing import SectorDistribution, step, transfer_matrix_3
from .fock_basis import Statistics, build_basis
from .scattering import (commutator_residual, compose, corrupt_lift, hamiltonian_matrix,
                         invariance_residual, lift_two_particle, make_beam_splitter)
from .thermal import LevelSpectrum, partition_terms, partition_terms_by_enumeration, thermal_density_matrix

THRESHOLD = 1e-10


def random_spectrum(rng: np.random.Generator, levels: int) -> LevelSpectrum:
    """Equal spacing, random gaps, or a ladder with a degenerate pair."""
    kind = rng.integers(3)
    if kind == 0:
        return LevelSpectrum.equally_spaced(levels, float(rng.uniform(0.1, 2.0)))
    gaps = rng.uniform(0.0, 1.5, size=levels - 1)
    if kind == 2 and levels > 1:
        gaps[rng.integers(levels - 1)] = 0.0
    return LevelSpectrum(tuple(np.concatenate([[0.0], np.cumsum(gaps)])))


def random_statistics(rng: np.random.Generator) -> Statistics:
    return Statistics.BOSON if rng.integers(2) == 0 else Statistics.FERMION


def random_splitter(rng: np.random.Generator):
    return make_beam_splitter(float(rng.uniform(0, 2 * math.pi)), float(rng.uniform(0, 2 * math.pi)))


def _splitter_params(s) -> str:
    return f"S={s.matrix.tolist()!r}"


@dataclass
class SuiteResult:
    name: str
    max_residual: float = 0.0
    worst_draw: str = ""
    draws: int = 0

    def update(self, residual: float, params: str) -> None:
        self.draws += 1
        if residual > self.max_residual or not self.worst_draw:
            self.max_residual = max(residual, self.max_residual)
            self.worst_draw = params

    @property
    def passed(self) -> bool:
        return self.max_residual <= THRESHOLD


@dataclass
class Report:
    seed: int
    draws: int
    suites: list[SuiteResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def to_text(self) -> str:
        lines = [f"# randomized verification seed={self.seed} draws={self.draws} threshold={THRESHOLD:g}\n",
                 "suite,draws,max_residual,status\n"]
        for s in self.suites:
            lines.append(f"{s.name},{s.draws},{s.max_residual:.3e},{'PASS' if s.passed else 'FAIL'}\n")
        for s in self.suites:
            if not s.passed:
                lines.append(f"# FAIL {s.name}: {s.worst_draw}\n")
        lines.append(f"# overall={'PASS' if self.passed else 'FAIL'}\n")
        return "".join(lines)


def suite_unitarity(rng, draws: int) -> SuiteResult:
    res = SuiteResult("lift_unitarity")
    for i in range(draws):
        levels, stats, s = int(rng.integers(1, 6)), random_statistics(rng), random_splitter(rng)
        u = lift_two_particle(s, build_basis(stats, levels))
        res.update(u.unitarity_residual(), f"draw={i} stats={stats.value} L={levels} {_splitter_params(s)}")
    return res


def suite_commutator(rng, draws: int, corrupt: bool = False) -> SuiteResult:
    res = SuiteResult("commutator")
    for i in range(draws):
        levels = int(rng.integers(2 if corrupt else 1, 6))
        stats, s = random_statistics(rng), random_splitter(rng)
        spectrum = random_spectrum(rng, levels)
        if corrupt and spectrum.energies[-1] == spectrum.energies[0]:
            spectrum = LevelSpectrum.equally_spaced(levels)
        basis = build_basis(stats, levels)
        u = lift_two_particle(s, basis)
        if corrupt:
            u = corrupt_lift(u, spectrum)
        r = commutator_residual(hamiltonian_matrix(basis, spectrum), u)
        res.update(r, f"draw={i} stats={stats.value} L={levels} energies={list(spectrum.energies)} "
                      f"{_splitter_params(s)} corrupt={corrupt}")
    return res


def suite_invariance(rng, draws: int, corrupt: bool = False) -> SuiteResult:
    res = SuiteResult("separation_invariance")
    for i in range(draws):
        levels = int(rng.integers(2 if corrupt else 1, 6))
        stats = random_statistics(rng)
        spectrum = random_spectrum(rng, levels)
        if corrupt and spectrum.energies[-1] == spectrum.energies[0]:
            spectrum = LevelSpectrum.equally_spaced(levels)
        beta = math.inf if rng.random() < 0.1 else float(rng.uniform(0, 20))
        splitters = [random_splitter(rng) for _ in range(int(rng.integers(1, 6)))]
        basis = build_basis(stats, levels)
        lifts = [lift_two_particle(s, basis) for s in splitters]
        if corrupt:
            lifts[0] = corrupt_lift(lifts[0], spectrum)
        r = invariance_residual(thermal_density_matrix(basis, spectrum, beta), compose(lifts))
        res.update(r, f"draw={i} stats={stats.value} L={levels} beta={beta!r} "
                      f"energies={list(spectrum.energies)} n_splitters={len(splitters)} "
                      f"{_splitter_params(splitters[0])} corrupt={corrupt}")
    return res


def suite_partition(rng, draws: int) -> SuiteResult:
    res = SuiteResult("partition_identity")
    for i in range(draws):
        levels, stats = int(rng.integers(1, 11)), random_statistics(rng)
        spectrum = random_spectrum(rng, levels)
        beta = float(rng.uniform(0, 20))
        closed = partition_terms(spectrum, beta, stats)
        enum = partition_terms_by_enumeration(spectrum, beta, stats)
        scale = enum.z2
        r = max(abs(closed.z2 - enum.z2), abs(closed.z_pq - enum.z_pq), abs(closed.z_p - enum.z_p),
                abs(enum.z_p - enum.z_q)) / scale
        res.update(r, f"draw={i} stats={stats.value} beta={beta!r} energies={list(spectrum.energies)}")
    return res


def suite_transfer(rng, draws: int, steps: int = 20) -> SuiteResult:
    res = SuiteResult("transfer_matrix_oracle")
    basis = build_basis(Statistics.BOSON, 1)
    for i in range(draws):
        theta, phase = float(rng.uniform(0, math.pi / 2)), float(rng.uniform(0, 2 * math.pi))
        s = make_beam_splitter(theta, phase)
        u = lift_two_particle(s, basis)
        m = transfer_matrix_3(s.R, 1.0 - s.R)
        start = rng.dirichlet(np.ones(3))
        v = start.copy()
        rho = SectorDistribution(*start).to_density(basis)
        worst = 0.0
        for _ in range(steps):
            v = m @ v
            rho = step(rho, u)
            worst = max(worst, float(np.abs(SectorDistribution.from_density(rho).as_array() - v).max()))
        res.update(worst, f"draw={i} theta={theta!r} phase={phase!r} start={start.tolist()}")
    return res


def run_all(seed: int, draws: int, corrupt: bool = False) -> Report:
    if draws < 1:
        raise ValueError("draws must be >= 1")
    rng = np.random.default_rng(seed)
    report = Report(seed, draws)
    report.suites = [
        suite_unitarity(rng, draws),
        suite_commutator(rng, draws, corrupt),
        suite_invariance(rng, draws, corrupt),
        suite_partition(rng, draws),
        suite_transfer(rng, draws),
    ]
    return report
