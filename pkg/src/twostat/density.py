"""Density matrices over a two-particle basis.

Matrices are held as sparse CSR arrays.  Everything the simulator produces is
block-diagonal in occupied-level sectors (blocks of at most four states), so
even the L = 40 bosonic basis (dimension 3240) stays cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .fock_basis import TwoParticleBasis

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


class BasisMismatchError(ValueError):
    pass


def _as_csr(matrix) -> sp.csr_array:
    if sp.issparse(matrix):
        return sp.csr_array(matrix, dtype=complex)
    return sp.csr_array(np.asarray(matrix, dtype=complex))


def max_abs(matrix) -> float:
    """Largest entry magnitude of a dense or sparse matrix (0 when empty)."""
    if sp.issparse(matrix):
        data = sp.csr_array(matrix).data
        return float(np.abs(data).max()) if data.size else 0.0
    arr = np.asarray(matrix)
    return float(np.abs(arr).max()) if arr.size else 0.0


def hermitian_blocks(matrix: sp.csr_array) -> list[np.ndarray]:
    """Index groups of the connected components of the sparsity graph."""
    n = matrix.shape[0]
    pattern = (abs(matrix) + abs(matrix.T)).tocsr()
    n_comp, labels = connected_components(pattern, directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(n_comp + 1))
    return [order[bounds[k]:bounds[k + 1]] for k in range(n_comp)]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    basis: TwoParticleBasis
    matrix: sp.csr_array

    def __init__(self, basis: TwoParticleBasis, matrix, *, check: bool = True):
        mat = _as_csr(matrix)
        mat.eliminate_zeros()
        if mat.shape != (basis.dimension, basis.dimension):
            raise BasisMismatchError(
                f"matrix shape {mat.shape} does not match basis dimension {basis.dimension}")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "matrix", mat)
        if check:
            herm = max_abs(mat - mat.conj().T)
            if herm > HERMITIAN_TOL:
                raise ValueError(f"density matrix not Hermitian (max deviation {herm:.3g})")
            tr = self.trace()
            if abs(tr - 1.0) > TRACE_TOL:
                raise ValueError(f"density matrix trace is {tr!r}, expected 1")

    @classmethod
    def from_diagonal(cls, basis: TwoParticleBasis, weights, *, check: bool = True) -> "DensityMatrix":
        w = np.asarray(weights, dtype=float)
        if w.shape != (basis.dimension,):
            raise BasisMismatchError(f"expected {basis.dimension} weights, got shape {w.shape}")
        if check and np.any(w < -PSD_TOL):
            raise ValueError("negative diagonal weight")
        return cls(basis, sp.diags_array(w.astype(complex), format="csr"), check=check)

    @classmethod
    def pure(cls, basis: TwoParticleBasis, amplitudes) -> "DensityMatrix":
        psi = np.asarray(amplitudes, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        support = np.flatnonzero(psi)
        block = np.outer(psi[support], psi[support].conj())
        rows, cols = np.meshgrid(support, support, indexing="ij")
        mat = sp.coo_array((block.ravel(), (rows.ravel(), cols.ravel())),
                           shape=(basis.dimension,) * 2).tocsr()
        return cls(basis, mat)

    @classmethod
    def basis_state(cls, basis: TwoParticleBasis, m1: int, m2: int) -> "DensityMatrix":
        w = np.zeros(basis.dimension)
        w[basis.index(m1, m2)] = 1.0
        return cls.from_diagonal(basis, w)

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    @property
    def is_diagonal(self) -> bool:
        coo = self.matrix.tocoo()
        return bool(np.all(coo.row == coo.col))

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def trace(self) -> float:
        return float(self.matrix.diagonal().sum().real)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def purity(self) -> float:
        """Tr(rho^2)."""
        return float((self.matrix @ self.matrix).diagonal().sum().real)

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues, sorted ascending; diagonal matrices skip the eigensolver."""
        if self.is_diagonal:
            return np.sort(self.diagonal())
        vals = []
        for idx in hermitian_blocks(self.matrix):
            if idx.size == 1:
                vals.append(self.matrix[idx[0], idx[0]].real)
            else:
                block = self.matrix[idx][:, idx].toarray()
                vals.extend(np.linalg.eigvalsh(0.5 * (block + block.conj().T)))
        return np.sort(np.asarray(vals, dtype=float))

    def validate(self, psd_tol: float = PSD_TOL) -> None:
        """Raise ValueError unless Hermitian, unit-trace and positive semidefinite."""
        herm = max_abs(self.matrix - self.matrix.conj().T)
        if herm > HERMITIAN_TOL:
            raise ValueError(f"density matrix not Hermitian (max deviation {herm:.3g})")
        if abs(self.trace() - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace is {self.trace()!r}")
        lo = self.eigenvalues().min()
        if lo < -psd_tol:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3g}")

    def require_same_basis(self, basis: TwoParticleBasis) -> None:
        if basis is self.basis:
            return
        if (basis.statistics, basis.levels) != (self.basis.statistics, self.basis.levels):
            raise BasisMismatchError(
                f"basis mismatch: {self.basis.statistics.value}/L={self.basis.levels} "
                f"vs {basis.statistics.value}/L={basis.levels}")
