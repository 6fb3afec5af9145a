"""Shared constructors for tests: known-geometry designs and fake records."""

from __future__ import annotations

import numpy as np

from substab.linalg import AvgProjection, DesignMatrix, SubspaceBasis, orthonormal_basis
from substab.subsampling import SelectionRecord


def centered_orthonormal(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """n-by-k matrix with exactly orthonormal, mean-zero columns (needs n > k)."""
    G = rng.standard_normal((n, k))
    G -= G.mean(axis=0)
    Q, R = np.linalg.qr(G)
    # fix signs so the construction is deterministic given the draw
    Q *= np.sign(np.diag(R))
    return Q


def design(values: np.ndarray, names=None) -> DesignMatrix:
    return DesignMatrix.from_array(np.asarray(values, dtype=np.float64), column_names=names)


def orthonormal_design(n: int, p: int, rng: np.random.Generator) -> DesignMatrix:
    return design(centered_orthonormal(n, p, rng))


def basis_of(Q: np.ndarray) -> SubspaceBasis:
    """Wrap an already-orthonormal matrix as a subspace basis."""
    Q = np.asarray(Q, dtype=np.float64)
    return SubspaceBasis(matrix=Q, rank=Q.shape[1], source=())


def projection_from_sets(X: DesignMatrix, sets) -> AvgProjection:
    """Average projection built directly from explicit feature sets."""
    bases = [orthonormal_basis(X, S) for S in sets]
    return AvgProjection(bases, design=X)


def records_from_sets(n: int, sets) -> list[SelectionRecord]:
    """Selection records with the given selected sets (rows are irrelevant)."""
    rows = np.arange(n // 2)
    return [
        SelectionRecord(subsample_index=i, rows=rows, selected=tuple(sorted(S)))
        for i, S in enumerate(sets)
    ]


def exact_correlation_design(n: int, R: np.ndarray, rng: np.random.Generator) -> DesignMatrix:
    """Centered design whose sample correlation matrix equals R exactly."""
    k = R.shape[0]
    Z = centered_orthonormal(n, k, rng)
    L = np.linalg.cholesky(R)
    return design(Z @ L.T)
