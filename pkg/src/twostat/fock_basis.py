"""Two-particle Fock basis over two sites (p, q) and L internal levels.

Single-particle modes are labelled by (site, level) and flattened
level-major, site-minor: ``flat = 2 * level + site``.  A two-particle basis
state is a canonical pair of flat mode indices ``m1 <= m2``; bosons allow
``m1 == m2`` (double occupancy), fermions do not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterator

import numpy as np

# dense-matrix memory budget: dimension <= 64 * 129 = 8256
MAX_LEVELS = 64


class Statistics(Enum):
    BOSON = "boson"
    FERMION = "fermion"

    @classmethod
    def parse(cls, value: "Statistics | str") -> "Statistics":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown statistics {value!r}; expected 'boson' or 'fermion'") from None


class Site(IntEnum):
    P = 0
    Q = 1


@dataclass(frozen=True, order=True)
class Mode:
    level: int
    site: Site

    @property
    def flat(self) -> int:
        return 2 * self.level + int(self.site)

    @classmethod
    def from_flat(cls, index: int) -> "Mode":
        if index < 0:
            raise ValueError(f"mode index must be non-negative, got {index}")
        return cls(index // 2, Site(index % 2))

    def __str__(self) -> str:
        return f"{self.site.name.lower()}{self.level}"


@dataclass(frozen=True, order=True)
class TwoParticleState:
    """Canonical two-particle state ``|m1, m2>`` with ``m1 <= m2``.

    ``norm`` is the factor that turns ``c†_{m1} c†_{m2} |0>`` into a unit
    vector: 1/sqrt(2) for a doubly occupied bosonic mode, 1 otherwise.
    """

    m1: int
    m2: int
    norm: float = field(default=1.0, compare=False)

    @property
    def modes(self) -> tuple[Mode, Mode]:
        return Mode.from_flat(self.m1), Mode.from_flat(self.m2)

    @property
    def levels(self) -> tuple[int, int]:
        return self.m1 // 2, self.m2 // 2

    @property
    def sector(self) -> tuple[int, int]:
        """Sorted pair of occupied levels; conserved by level-blind scattering."""
        a, b = self.levels
        return (a, b) if a <= b else (b, a)

    @property
    def label(self) -> str:
        a, b = self.modes
        return f"{a}{b}"


def site_occupation(state: TwoParticleState) -> tuple[int, int]:
    """Return ``(n_p, n_q)``: how many of the two particles sit at each site."""
    n_q = state.m1 % 2 + state.m2 % 2
    return 2 - n_q, n_q


def state_energy(state: TwoParticleState, spectrum) -> float:
    """Sum of the single-particle level energies of ``state``."""
    energies = spectrum.energies
    n1, n2 = state.levels
    if max(n1, n2) >= len(energies):
        raise ValueError(f"state {state.label} uses level {max(n1, n2)} "
                         f"but the spectrum has only {len(energies)} levels")
    return float(energies[n1] + energies[n2])


@dataclass(frozen=True)
class TwoParticleBasis:
    statistics: Statistics
    levels: int
    states: tuple[TwoParticleState, ...]
    _index: dict = field(repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return len(self.states)

    @property
    def modes(self) -> int:
        return 2 * self.levels

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[TwoParticleState]:
        return iter(self.states)

    def __getitem__(self, i: int) -> TwoParticleState:
        return self.states[i]

    def index(self, m1: int, m2: int) -> int:
        """Position of the state occupying modes ``m1`` and ``m2`` (any order)."""
        key = (m1, m2) if m1 <= m2 else (m2, m1)
        try:
            return self._index[key]
        except KeyError:
            raise KeyError(f"no {self.statistics.value} basis state on modes {key}") from None

    def __contains__(self, key) -> bool:
        m1, m2 = key
        return ((m1, m2) if m1 <= m2 else (m2, m1)) in self._index

    def occupations(self) -> np.ndarray:
        """(dimension, 2) array of site occupations ``(n_p, n_q)``."""
        return np.array([site_occupation(s) for s in self.states], dtype=int)

    def coincidence_mask(self) -> np.ndarray:
        """Boolean mask of states with one particle at each site."""
        return np.array([(s.m1 + s.m2) % 2 == 1 for s in self.states])

    def energies(self, spectrum) -> np.ndarray:
        return np.array([state_energy(s, spectrum) for s in self.states], dtype=float)

    def sectors(self) -> dict[tuple[int, int], list[int]]:
        """Map each occupied-level pair to the basis indices sharing it."""
        out: dict[tuple[int, int], list[int]] = {}
        for i, s in enumerate(self.states):
            out.setdefault(s.sector, []).append(i)
        return out


def expected_dimension(statistics: Statistics, levels: int) -> int:
    m = 2 * levels
    return m * (m + 1) // 2 if statistics is Statistics.BOSON else m * (m - 1) // 2


def build_basis(statistics: Statistics | str, levels: int) -> TwoParticleBasis:
    """Enumerate the canonical (anti)symmetrized basis, sorted by ``(m1, m2)``."""
    statistics = Statistics.parse(statistics)
    if isinstance(levels, bool) or int(levels) != levels or levels < 1:
        raise ValueError(f"levels must be a positive integer, got {levels!r}")
    levels = int(levels)
    if levels > MAX_LEVELS:
        raise ValueError(f"levels={levels} exceeds the matrix-engine limit of {MAX_LEVELS}")

    boson = statistics is Statistics.BOSON
    n_modes = 2 * levels
    states = []
    for m1 in range(n_modes):
        for m2 in range(m1 if boson else m1 + 1, n_modes):
            norm = 1.0 / math.sqrt(2.0) if m1 == m2 else 1.0
            states.append(TwoParticleState(m1, m2, norm))
    index = {(s.m1, s.m2): i for i, s in enumerate(states)}
    return TwoParticleBasis(statistics, levels, tuple(states), index)
