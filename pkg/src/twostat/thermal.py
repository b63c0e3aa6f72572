"""Canonical-ensemble statistics of two identical particles on two sites.

The partition function splits by site configuration,
``Z2 = Z_pq + Z_p + Z_q``, with ``Z_pq = (sum_n e^{-beta e_n})^2`` and a
same-site term that differs between bosons and fermions.  The coincidence
probability ``P(1,1) = Z_pq / Z2`` is exposed both in closed form (infinite
equally spaced ladder) and numerically for any truncated spectrum.

Inverse temperatures are plain floats; ``math.inf`` is the T = 0 limit and is
handled symbolically (ground-state projector) instead of as a large number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .density import DensityMatrix
from .fock_basis import Statistics, TwoParticleBasis, build_basis, site_occupation

# |p11_numeric(L) - p11_analytic| <= TRUNCATION_ERROR_FACTOR * tol at L = required_truncation(., tol)
TRUNCATION_ERROR_FACTOR = 3.0


@dataclass(frozen=True)
class LevelSpectrum:
    """Internal energy ladder of one particle, non-decreasing, length >= 1."""

    energies: tuple[float, ...]
    spacing: float | None = None

    def __post_init__(self):
        e = tuple(float(x) for x in self.energies)
        object.__setattr__(self, "energies", e)
        if not e:
            raise ValueError("spectrum needs at least one level")
        if not all(math.isfinite(x) for x in e):
            raise ValueError("spectrum energies must be finite")
        if any(b < a for a, b in zip(e, e[1:])):
            raise ValueError("spectrum energies must be non-decreasing")
        if self.spacing is not None:
            if not self.spacing > 0:
                raise ValueError(f"spacing must be positive, got {self.spacing}")
            if any(x != n * self.spacing for n, x in enumerate(e)):
                raise ValueError("energies do not match the declared equal spacing")

    @classmethod
    def equally_spaced(cls, levels: int, spacing: float = 1.0) -> "LevelSpectrum":
        if levels < 1:
            raise ValueError(f"levels must be >= 1, got {levels}")
        return cls(tuple(n * spacing for n in range(levels)), spacing=spacing)

    def __len__(self) -> int:
        return len(self.energies)

    @property
    def levels(self) -> int:
        return len(self.energies)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.energies, dtype=float)


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if math.isnan(beta) or beta < 0:
        raise ValueError(f"beta must be >= 0 (math.inf for T = 0), got {beta}")
    return beta


def boltzmann_factors(energies, beta: float) -> np.ndarray:
    """``e^{-beta E}`` elementwise, with the T = 0 limit taken exactly."""
    e = np.asarray(energies, dtype=float)
    if math.isinf(beta):
        return np.where(e == 0, 1.0, np.where(e > 0, 0.0, np.inf))
    return np.exp(-beta * e)


def relative_boltzmann(energies, beta: float) -> np.ndarray:
    """Boltzmann factors shifted by the minimum energy, so the largest is 1.

    Ratios of these are the physically meaningful probabilities; the shift
    avoids overflow and makes beta = inf a uniform ground-state weight.
    """
    e = np.asarray(energies, dtype=float)
    return boltzmann_factors(e - e.min(), beta)


def single_particle_sum(spectrum: LevelSpectrum, beta: float) -> float:
    beta = _check_beta(beta)
    return float(math.fsum(boltzmann_factors(spectrum.as_array(), beta)))


def _doubled_sum(spectrum: LevelSpectrum, beta: float) -> float:
    return float(math.fsum(boltzmann_factors(2.0 * spectrum.as_array(), beta)))


def z_pq(spectrum: LevelSpectrum, beta: float) -> float:
    return single_particle_sum(spectrum, beta) ** 2


def z_same_site(spectrum: LevelSpectrum, beta: float, statistics: Statistics | str) -> float:
    """Same-site contribution ``Z_p`` (= ``Z_q``).

    Distinct-level pairs contribute ``(S^2 - D) / 2`` with ``S`` the single
    particle sum and ``D = sum_n e^{-2 beta e_n}``; bosons add ``D`` for the
    doubly occupied levels, which Pauli exclusion removes for fermions.
    """
    statistics = Statistics.parse(statistics)
    beta = _check_beta(beta)
    w = boltzmann_factors(spectrum.as_array(), beta)
    distinct = _distinct_pair_sum(w)
    if statistics is Statistics.FERMION:
        return distinct
    return distinct + _doubled_sum(spectrum, beta)


def _distinct_pair_sum(w: np.ndarray) -> float:
    """``sum_{m<n} w_m w_n`` without the cancellation in ``(S^2 - D) / 2``."""
    if w.size < 2:
        return 0.0
    below = np.cumsum(w)[:-1]
    return float(math.fsum(w[1:] * below))


@dataclass(frozen=True)
class PartitionTerms:
    z_pq: float
    z_p: float
    z_q: float

    @property
    def z2(self) -> float:
        return self.z_pq + self.z_p + self.z_q

    @property
    def p11(self) -> float:
        return self.z_pq / self.z2


def partition_terms(spectrum: LevelSpectrum, beta: float, statistics: Statistics | str) -> PartitionTerms:
    same = z_same_site(spectrum, beta, statistics)
    return PartitionTerms(z_pq(spectrum, beta), same, same)


def partition_terms_by_enumeration(spectrum: LevelSpectrum, beta: float,
                                   statistics: Statistics | str) -> PartitionTerms:
    """Brute-force oracle: sum Boltzmann weights over every basis state."""
    beta = _check_beta(beta)
    basis = build_basis(statistics, spectrum.levels)
    weights = boltzmann_factors(basis.energies(spectrum), beta)
    buckets = {(2, 0): [], (1, 1): [], (0, 2): []}
    for state, w in zip(basis.states, weights):
        buckets[site_occupation(state)].append(w)
    return PartitionTerms(math.fsum(buckets[(1, 1)]), math.fsum(buckets[(2, 0)]),
                          math.fsum(buckets[(0, 2)]))


def p11_numeric(spectrum: LevelSpectrum, beta: float, statistics: Statistics | str) -> float:
    """``Z_pq / (Z_pq + 2 Z_p)`` for an arbitrary truncated spectrum."""
    statistics = Statistics.parse(statistics)
    beta = _check_beta(beta)
    # shift energies so the ground level has weight 1; P(1,1) is shift invariant
    w = relative_boltzmann(spectrum.as_array(), beta)
    s = math.fsum(w)
    coincident = s * s
    same = _distinct_pair_sum(w) + (math.fsum(w * w) if statistics is Statistics.BOSON else 0.0)
    return coincident / (coincident + 2.0 * same)


def _x_of(beta_delta: float) -> float:
    beta_delta = float(beta_delta)
    if math.isnan(beta_delta) or beta_delta < 0:
        raise ValueError(f"beta_delta must be >= 0, got {beta_delta}")
    return 0.0 if math.isinf(beta_delta) else math.exp(-beta_delta)


def p11_analytic(beta_delta: float, statistics: Statistics | str) -> float:
    """Closed form for the infinite ladder ``e_n = n Delta``.

    Bosons ``(e^{bD} + 1) / (3 e^{bD} + 1)``, fermions ``(e^{bD} + 1) / (e^{bD} + 3)``,
    evaluated with ``x = e^{-bD}`` so large ``bD`` cannot overflow.
    """
    statistics = Statistics.parse(statistics)
    x = _x_of(beta_delta)
    if statistics is Statistics.BOSON:
        return (1.0 + x) / (3.0 + x)
    return (1.0 + x) / (1.0 + 3.0 * x)


def required_truncation(beta_delta: float, tolerance: float) -> int:
    """Smallest ladder length L with ``e^{-L beta_delta} <= tolerance``.

    At that L the truncated-ladder P(1,1) differs from the closed form by at
    most ``TRUNCATION_ERROR_FACTOR * tolerance``.
    """
    if not 0.0 < tolerance < 1.0:
        raise ValueError(f"tolerance must lie in (0, 1), got {tolerance}")
    beta_delta = float(beta_delta)
    if not beta_delta > 0:
        raise ValueError("beta_delta must be > 0: no finite ladder reproduces infinite temperature")
    if math.isinf(beta_delta):
        return 1
    log_tol = math.log(tolerance)
    n = max(1, math.ceil(-log_tol / beta_delta))
    # guard the ceil against rounding at exact boundaries
    while -n * beta_delta > log_tol:
        n += 1
    while n > 1 and -(n - 1) * beta_delta <= log_tol:
        n -= 1
    return n


def thermal_density_matrix(basis: TwoParticleBasis, spectrum: LevelSpectrum, beta: float) -> DensityMatrix:
    """``e^{-beta H} / Z2`` on the truncated basis (diagonal in the Fock basis)."""
    beta = _check_beta(beta)
    if basis.levels != spectrum.levels:
        raise ValueError(f"basis has {basis.levels} levels, spectrum has {spectrum.levels}")
    w = relative_boltzmann(basis.energies(spectrum), beta)
    return DensityMatrix.from_diagonal(basis, w / math.fsum(w))


def product_injection_matrix(basis: TwoParticleBasis, spectrum: LevelSpectrum, beta: float) -> DensityMatrix:
    """One particle enters at each site with an independent Boltzmann level.

    The state with the particle at p in level m and the one at q in level n gets
    weight proportional to ``e^{-beta (e_m + e_n)}``; doubly occupied sites get
    nothing.
    """
    beta = _check_beta(beta)
    if basis.levels != spectrum.levels:
        raise ValueError(f"basis has {basis.levels} levels, spectrum has {spectrum.levels}")
    w = relative_boltzmann(basis.energies(spectrum), beta) * basis.coincidence_mask()
    return DensityMatrix.from_diagonal(basis, w / math.fsum(w))


def thermal_sector_injection_matrix(basis: TwoParticleBasis, spectrum: LevelSpectrum,
                                    beta: float) -> DensityMatrix:
    """Coincidence-only injection carrying the thermal weight of each level sector.

    Each occupied-level sector receives its equilibrium probability, spread
    evenly over the sector's one-particle-per-site states.  Because scattering
    never moves weight between sectors, the dephased array relaxes from here
    to the thermal state.
    """
    thermal = thermal_density_matrix(basis, spectrum, beta).diagonal()
    mask = basis.coincidence_mask()
    w = np.zeros(basis.dimension)
    for idx in basis.sectors().values():
        idx = np.asarray(idx)
        targets = idx[mask[idx]]
        w[targets] = thermal[idx].sum() / targets.size
    return DensityMatrix.from_diagonal(basis, w / math.fsum(w))


def same_level_probability(beta_delta: float) -> float:
    """Chance two independently Boltzmann-distributed particles share a level
    on the infinite equally spaced ladder: ``(1 - x) / (1 + x)``."""
    x = _x_of(beta_delta)
    return (1.0 - x) / (1.0 + x)


def p11_product_injection_limit(beta_delta: float, statistics: Statistics | str) -> float:
    """Long-run coincidence probability of the dephased array under product injection.

    Level sectors are conserved, so the same-level fraction ``s`` relaxes to
    its own sector equilibrium (1/3 bosons, 1 fermions) and the rest to 1/2.
    """
    statistics = Statistics.parse(statistics)
    s = same_level_probability(beta_delta)
    same = 1.0 / 3.0 if statistics is Statistics.BOSON else 1.0
    return s * same + (1.0 - s) * 0.5


def beta_from_kt(kt_over_delta: float, spacing: float = 1.0) -> float:
    if not kt_over_delta > 0:
        raise ValueError(f"kT/Delta must be > 0, got {kt_over_delta}")
    return 1.0 / (kt_over_delta * spacing)


def grid(lo: float, hi: float, points: int, kind: str = "log") -> Sequence[float]:
    if kind == "log":
        return np.geomspace(lo, hi, points)
    if kind == "linear":
        return np.linspace(lo, hi, points)
    raise ValueError(f"unknown grid {kind!r}")
