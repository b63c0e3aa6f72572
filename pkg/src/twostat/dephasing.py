"""Beam-splitter array with strong dephasing between elements.

Each array element applies a two-particle unitary and then discards every
off-diagonal element in the canonical occupation basis.  For a single-level
boson pair the diagonal ``(a, b, c)`` over ``(|pp>, |qq>, |pq>)`` evolves by a
3x3 doubly stochastic transfer matrix, which doubles as an oracle for the
full matrix dynamics.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .density import DensityMatrix
from .fock_basis import Statistics, TwoParticleBasis
from .scattering import TwoParticleUnitary, apply_unitary

DEFAULT_TOLERANCE = 1e-12
DEFAULT_MAX_STEPS = 10_000
ENTROPY_NEGATIVE_TOL = 1e-8
# splitters this close to R in {0, 1} never mix the sites
DEGENERATE_SPLITTER_TOL = 1e-12


class PSDViolationError(ValueError):
    pass


@dataclass(frozen=True)
class SectorDistribution:
    """Weights of ``|pp>``, ``|qq>`` and ``|pq>`` for a single-level boson pair."""

    a: float
    b: float
    c: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    @classmethod
    def from_density(cls, rho: DensityMatrix) -> "SectorDistribution":
        basis = rho.basis
        if basis.statistics is not Statistics.BOSON or basis.levels != 1:
            raise ValueError("sector distribution is defined for the L = 1 boson basis only")
        d = rho.diagonal()
        return cls(d[basis.index(0, 0)], d[basis.index(1, 1)], d[basis.index(0, 1)])

    def to_density(self, basis: TwoParticleBasis) -> DensityMatrix:
        w = np.zeros(3)
        w[basis.index(0, 0)], w[basis.index(1, 1)], w[basis.index(0, 1)] = self.a, self.b, self.c
        return DensityMatrix.from_diagonal(basis, w)


def dephase(rho: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(rho.basis, sp.diags_array(rho.matrix.diagonal(), format="csr"), check=False)


def step(rho: DensityMatrix, u: TwoParticleUnitary) -> DensityMatrix:
    return dephase(apply_unitary(u, rho))


def p11_of_rho(rho: DensityMatrix) -> float:
    return float(rho.diagonal()[rho.basis.coincidence_mask()].sum())


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """``-sum lambda ln lambda`` in nats, with 0 ln 0 = 0."""
    lam = rho.eigenvalues()
    if lam.size and lam.min() < -ENTROPY_NEGATIVE_TOL:
        raise PSDViolationError(f"density matrix has eigenvalue {lam.min():.3g}")
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam))) + 0.0  # fold -0.0


def transfer_matrix_3(R: float, T: float) -> np.ndarray:
    """Map ``(a, b, c) -> (a', b', c')`` for one splitter plus dephasing."""
    if abs(R + T - 1.0) > 1e-12:
        raise ValueError(f"R + T must equal 1, got {R + T!r}")
    if not 0.0 <= R <= 1.0:
        raise ValueError(f"R must lie in [0, 1], got {R}")
    rt = 2.0 * R * T
    return np.array([
        [R * R, T * T, rt],
        [T * T, R * R, rt],
        [rt, rt, (R - T) ** 2],
    ])


def recursion_ratios(R: float, T: float) -> tuple[float, float]:
    """Per-step decay factors of ``a - b`` and ``a + b - 2c``."""
    return R * R - T * T, (R - T) ** 2 - 2.0 * R * T


@dataclass(frozen=True)
class StepRecord:
    step: int
    diagonal: np.ndarray
    p11: float
    entropy: float
    max_delta: float  # change of the diagonal from the previous record, nan at step 0


@dataclass
class Trajectory:
    records: list[StepRecord] = field(default_factory=list)
    converged: bool = False
    steps_to_converge: int | None = None
    diagnostic: str | None = None
    final: DensityMatrix | None = None

    @property
    def p11(self) -> np.ndarray:
        return np.array([r.p11 for r in self.records])

    @property
    def entropy(self) -> np.ndarray:
        return np.array([r.entropy for r in self.records])

    def sectors(self) -> list[SectorDistribution]:
        basis = self.final.basis
        out = []
        for r in self.records:
            d = r.diagonal
            out.append(SectorDistribution(d[basis.index(0, 0)], d[basis.index(1, 1)],
                                          d[basis.index(0, 1)]))
        return out


def _record(i: int, rho: DensityMatrix, prev: np.ndarray | None) -> StepRecord:
    d = rho.diagonal()
    delta = math.nan if prev is None else float(np.abs(d - prev).max())
    return StepRecord(i, d, p11_of_rho(rho), von_neumann_entropy(rho), delta)


def _is_degenerate(u: TwoParticleUnitary) -> bool:
    s = u.splitter
    return s is not None and min(s.R, s.T) <= DEGENERATE_SPLITTER_TOL


def iterate_to_equilibrium(rho0: DensityMatrix,
                           u: TwoParticleUnitary | Sequence[TwoParticleUnitary],
                           max_steps: int = DEFAULT_MAX_STEPS,
                           tolerance: float = DEFAULT_TOLERANCE,
                           dephasing: bool = True) -> Trajectory:
    """Run the array until the diagonal stops changing.

    ``u`` is one unitary reused at every element or a list cycled through in
    order.  Convergence is declared at the first record whose successor
    differs from it by less than ``tolerance`` (max entry of the diagonal);
    that record is the last one kept, so a state already at equilibrium
    yields a single record and ``steps_to_converge == 0``.  With
    ``dephasing=False`` the elements are purely unitary.
    """
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")
    if not tolerance > 0:
        raise ValueError(f"tolerance must be > 0, got {tolerance}")
    unitaries = [u] if isinstance(u, TwoParticleUnitary) else list(u)
    if not unitaries:
        raise ValueError("need at least one unitary")
    for w in unitaries:
        rho0.require_same_basis(w.basis)

    rho = rho0
    traj = Trajectory(records=[_record(0, rho, None)], final=rho)
    if all(_is_degenerate(w) for w in unitaries):
        s = unitaries[0].splitter
        traj.diagnostic = (f"splitter with R={s.R:.6g}, T={s.T:.6g} does not mix the sites; "
                           "the array cannot equilibrate (needs 0 < R, T < 1)")
        return traj

    cycle = itertools.cycle(unitaries)
    for i in range(1, max_steps + 1):
        w = next(cycle)
        nxt = step(rho, w) if dephasing else apply_unitary(w, rho)
        prev = traj.records[-1].diagonal
        delta = float(np.abs(nxt.diagonal() - prev).max())
        if delta < tolerance:
            traj.converged = True
            traj.steps_to_converge = i - 1
            return traj
        rho = nxt
        traj.records.append(_record(i, rho, prev))
        traj.final = rho
    traj.diagnostic = f"not converged after {max_steps} steps (last change {traj.records[-1].max_delta:.3g})"
    return traj

