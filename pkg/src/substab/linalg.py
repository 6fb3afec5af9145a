"""Column-subspace primitives.

Everything downstream measures models through the column spaces their
features span.  This module owns the basis construction and the handful of
subspace quantities built on cross-Gram matrices; no n-by-n projection
matrix is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .util import as_feature_set

__all__ = [
    "DesignMatrix",
    "SubspaceBasis",
    "AvgProjection",
    "orthonormal_basis",
    "trace_inner",
    "principal_cosines",
    "average_alignment",
    "worst_alignment",
]

DEFAULT_RANK_RTOL = 1e-10


# ---------------------------------------------------------------------------
# data containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """Centered design with named columns.

    Parameters
    ----------
    values : ndarray of shape (n, p)
        Column-centered, float64, C-contiguous.
    column_names : tuple of str
        One name per column.
    """

    values: np.ndarray
    column_names: tuple[str, ...]

    def __post_init__(self):
        v = self.values
        if v.ndim != 2:
            raise ValueError("design must be a 2-d array")
        if not np.all(np.isfinite(v)):
            raise ValueError("design contains non-finite entries")
        if len(self.column_names) != v.shape[1]:
            raise ValueError("one column name required per column")

    @classmethod
    def from_array(cls, values, column_names=None) -> "DesignMatrix":
        """Build a design from a raw array; columns are centered here."""
        v = np.ascontiguousarray(np.asarray(values, dtype=np.float64))
        if v.ndim != 2:
            raise ValueError("design must be a 2-d array")
        v = v - v.mean(axis=0)
        if column_names is None:
            column_names = tuple(f"x{j}" for j in range(v.shape[1]))
        return cls(values=v, column_names=tuple(str(c) for c in column_names))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def names_for(self, indices) -> tuple[str, ...]:
        return tuple(self.column_names[j] for j in indices)


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal basis of the column space of one feature set.

    ``rank`` can be smaller than ``len(source)`` when the columns are
    linearly dependent at the working tolerance.
    """

    matrix: np.ndarray  # (n, rank), orthonormal columns
    rank: int
    source: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(eq=False)
class AvgProjection:
    """Average of projections onto the per-subsample selected subspaces.

    Stores the individual bases plus one stacked matrix holding all basis
    columns side by side, so alignment and spectrum computations reduce to
    a single product with the stack.  ``design`` optionally records the
    design matrix whose columns the bases were built from, letting
    consumers span new feature sets against the same columns.
    """

    bases: list[SubspaceBasis]
    design: "DesignMatrix | None" = None
    stacked: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.bases:
            raise ValueError("need at least one basis")
        n = self.bases[0].n
        if any(b.n != n for b in self.bases):
            raise ValueError("bases live in different ambient dimensions")
        if self.design is not None and self.design.n != n:
            raise ValueError("design row count does not match the bases")
        cols = [b.matrix for b in self.bases if b.rank > 0]
        if cols:
            self.stacked = np.ascontiguousarray(np.hstack(cols))
        else:
            self.stacked = np.zeros((n, 0))

    @property
    def count(self) -> int:
        return len(self.bases)

    @property
    def n(self) -> int:
        return self.bases[0].n


# ---------------------------------------------------------------------------
# basis construction
# ---------------------------------------------------------------------------


def orthonormal_basis(X: DesignMatrix, S, rank_rtol: float = DEFAULT_RANK_RTOL) -> SubspaceBasis:
    """Orthonormal basis for the span of the columns of ``X`` listed in ``S``.

    Rank is decided from the singular values: directions below
    ``rank_rtol`` times the largest singular value are discarded.
    """
    S = as_feature_set(S)
    if any(j >= X.p for j in S):
        raise IndexError(f"feature index out of range for p={X.p}")
    if not S:
        return SubspaceBasis(matrix=np.zeros((X.n, 0)), rank=0, source=S)
    sub = X.values[:, S]
    U, sv, _ = np.linalg.svd(sub, full_matrices=False)
    if sv.size == 0 or sv[0] <= 0.0:
        rank = 0
    else:
        rank = int(np.sum(sv > rank_rtol * sv[0]))
    return SubspaceBasis(matrix=np.ascontiguousarray(U[:, :rank]), rank=rank, source=S)


# ---------------------------------------------------------------------------
# subspace quantities
# ---------------------------------------------------------------------------


def trace_inner(A: SubspaceBasis, B: SubspaceBasis) -> float:
    """Trace of the product of the two subspace projections.

    Equals the squared Frobenius norm of the cross-Gram of the bases, and
    the sum of squared principal cosines.  Zero when either rank is zero.
    """
    if A.rank == 0 or B.rank == 0:
        return 0.0
    G = A.matrix.T @ B.matrix
    return float(np.sum(G * G))


def principal_cosines(A: SubspaceBasis, B: SubspaceBasis) -> np.ndarray:
    """Squared cosines of the principal angles, in decreasing order.

    Length min(rank(A), rank(B)); values clipped to [0, 1].
    """
    if A.rank == 0 or B.rank == 0:
        return np.zeros(0)
    sv = np.linalg.svd(A.matrix.T @ B.matrix, compute_uv=False)
    return np.clip(sv, 0.0, 1.0) ** 2


def average_alignment(v: np.ndarray, P: AvgProjection) -> float:
    """Average squared alignment of a direction with the stored subspaces.

    For unit v this is the mean over subsamples of the squared norm of the
    projection of v onto each selected subspace; general v is normalized
    first.  Clipped to [0, 1].
    """
    v = np.asarray(v, dtype=np.float64).ravel()
    nrm2 = float(v @ v)
    if nrm2 <= 0.0:
        raise ValueError("direction must be nonzero")
    w = P.stacked.T @ v
    return float(np.clip((w @ w) / (nrm2 * P.count), 0.0, 1.0))


def worst_alignment(basis: SubspaceBasis, P: AvgProjection) -> float:
    """Smallest average alignment over unit directions inside ``basis``.

    Computed as the smallest eigenvalue of the average projection
    compressed to the subspace.  Returns 1 for a rank-zero basis (the
    minimum over an empty set of directions is vacuous).
    """
    val, _ = worst_alignment_direction(basis, P)
    return val


def worst_alignment_direction(basis: SubspaceBasis, P: AvgProjection):
    """Like :func:`worst_alignment` but also returns the minimizing direction.

    The direction is a unit vector in the ambient space lying inside the
    span of ``basis``; for a rank-zero basis it is None.
    """
    if basis.rank == 0:
        return 1.0, None
    G = P.stacked.T @ basis.matrix  # (total basis columns, rank)
    M = (G.T @ G) / P.count
    vals, vecs = np.linalg.eigh(M)
    val = float(np.clip(vals[0], 0.0, 1.0))
    direction = basis.matrix @ vecs[:, 0]
    direction /= np.linalg.norm(direction)
    return val, direction


def _joint_basis(A: SubspaceBasis, B: SubspaceBasis, rank_rtol: float = DEFAULT_RANK_RTOL):
    """Orthonormal basis of span(A) + span(B)."""
    cols = [M for M in (A.matrix, B.matrix) if M.shape[1] > 0]
    if not cols:
        return np.zeros((A.n, 0))
    C = np.hstack(cols)
    U, sv, _ = np.linalg.svd(C, full_matrices=False)
    if sv.size == 0 or sv[0] <= 0.0:
        return np.zeros((A.n, 0))
    rank = int(np.sum(sv > rank_rtol * sv[0]))
    return U[:, :rank]


def projection_difference_eig(A: SubspaceBasis, B: SubspaceBasis):
    """Eigen-decomposition of the difference of the two projections.

    Returns ``(vals, vecs)`` restricted to span(A)+span(B): eigenvalues in
    increasing order and the matching eigenvectors as columns of an
    n-by-k matrix.  All other eigenvalues of the difference are zero.
    """
    W = _joint_basis(A, B)
    if W.shape[1] == 0:
        return np.zeros(0), np.zeros((A.n, 0))
    GA = W.T @ A.matrix
    GB = W.T @ B.matrix
    M = GA @ GA.T - GB @ GB.T
    vals, vecs = np.linalg.eigh(M)
    return vals, W @ vecs
