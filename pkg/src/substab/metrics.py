"""Similarity, error and stability measures on feature sets.

Feature sets are compared through the column subspaces they span, so two
sets of highly correlated features count as close even when they share no
indices.  All quantities reduce to small cross-Gram computations; nothing
here forms an n-by-n matrix.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import brentq

from .linalg import (
    DEFAULT_RANK_RTOL,
    AvgProjection,
    DesignMatrix,
    SubspaceBasis,
    orthonormal_basis,
    principal_cosines,
    projection_difference_eig,
    trace_inner,
    worst_alignment,
)
from .util import as_feature_set

__all__ = [
    "BasisCache",
    "subspace_similarity",
    "normalized_similarity",
    "worst_case_similarity",
    "prediction_gap",
    "response_similarity",
    "cone_similarity",
    "true_false_positives",
    "set_stability",
    "is_maximal_stable",
    "output_stability",
]

log = logging.getLogger(__name__)


class BasisCache:
    """Memo of orthonormal bases keyed by feature set, for one design.

    Plain dict underneath: fine for concurrent readers under the
    interpreter lock; writers should be serialized or use one cache per
    worker.
    """

    def __init__(self, X: DesignMatrix, rank_rtol: float = DEFAULT_RANK_RTOL):
        self.X = X
        self.rank_rtol = rank_rtol
        self._store: dict[tuple[int, ...], SubspaceBasis] = {}

    def get(self, S) -> SubspaceBasis:
        key = as_feature_set(S)
        basis = self._store.get(key)
        if basis is None:
            basis = orthonormal_basis(self.X, key, self.rank_rtol)
            self._store[key] = basis
        return basis

    def __len__(self) -> int:
        return len(self._store)


def _basis(X: DesignMatrix, S, cache: BasisCache | None) -> SubspaceBasis:
    if cache is not None:
        return cache.get(S)
    return orthonormal_basis(X, S)


# ---------------------------------------------------------------------------
# similarity measures
# ---------------------------------------------------------------------------


def subspace_similarity(X: DesignMatrix, S1, S2, cache: BasisCache | None = None) -> float:
    """Trace of the product of the projections onto the two column spans.

    Ranges over [0, min(|S1|, |S2|)]; counts, direction by direction, how
    much of one subspace lies inside the other.  Symmetric in S1 and S2.
    """
    return trace_inner(_basis(X, S1, cache), _basis(X, S2, cache))


def normalized_similarity(X: DesignMatrix, S1, S2, cache: BasisCache | None = None) -> float:
    """Subspace similarity scaled to [0, 1] by the smaller set size.

    When either set is empty the 0/0 ratio is taken as 1.
    """
    S1 = as_feature_set(S1)
    S2 = as_feature_set(S2)
    m = min(len(S1), len(S2))
    if m == 0:
        return 1.0
    return float(np.clip(subspace_similarity(X, S1, S2, cache) / m, 0.0, 1.0))


def worst_case_similarity(X: DesignMatrix, S1, S2, cache: BasisCache | None = None) -> float:
    """Squared cosine of the largest of max(|S1|, |S2|) principal angles.

    Zero whenever the set sizes differ, and zero when either set is rank
    deficient at the working tolerance; 1 for two empty sets.
    """
    S1 = as_feature_set(S1)
    S2 = as_feature_set(S2)
    L = max(len(S1), len(S2))
    if L == 0:
        return 1.0
    if len(S1) != len(S2):
        return 0.0
    A = _basis(X, S1, cache)
    B = _basis(X, S2, cache)
    if A.rank < L or B.rank < L:
        return 0.0
    cos2 = principal_cosines(A, B)
    return float(cos2[-1])


def prediction_gap(X: DesignMatrix, S1, S2, cache: BasisCache | None = None) -> float:
    """Largest squared prediction difference over unit responses.

    max over unit y of ||proj_1(y) - proj_2(y)||^2, the squared spectral
    norm of the difference of the two projections.  For equal-size,
    full-rank sets this equals 1 - worst_case_similarity.
    """
    A = _basis(X, S1, cache)
    B = _basis(X, S2, cache)
    vals, _ = projection_difference_eig(A, B)
    if vals.size == 0:
        return 0.0
    return float(np.clip(np.max(vals * vals), 0.0, 1.0))


def response_similarity(X: DesignMatrix, y, S1, S2, cache: BasisCache | None = None) -> float:
    """One minus the squared prediction difference at the observed response.

    Disagreement between the two subspaces in directions carrying no part
    of y is ignored.
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    ny2 = float(y @ y)
    if ny2 <= 0.0:
        raise ValueError("response must be nonzero")
    A = _basis(X, S1, cache)
    B = _basis(X, S2, cache)
    d = A.matrix @ (A.matrix.T @ y) - B.matrix @ (B.matrix.T @ y)
    return float(np.clip(1.0 - (d @ d) / ny2, 0.0, 1.0))


def cone_similarity(
    X: DesignMatrix, y, S1, S2, angle: float, cache: BasisCache | None = None
) -> float:
    """One minus the worst squared prediction difference over a response cone.

    The cone holds every unit direction within ``angle`` of the normalized
    response.  ``angle = 0`` recovers :func:`response_similarity` and
    ``angle = pi/2`` recovers the response-free worst case.  The inner
    maximization is solved exactly: if the cone reaches the top eigenspace
    of the projection difference the maximum is its largest squared
    eigenvalue, otherwise it sits on the cone boundary, where the standard
    sphere-constrained quadratic argument applies.
    """
    if not 0.0 <= angle <= np.pi / 2 + 1e-12:
        raise ValueError("cone angle must lie in [0, pi/2]")
    y = np.asarray(y, dtype=np.float64).ravel()
    ny = float(np.linalg.norm(y))
    if ny <= 0.0:
        raise ValueError("response must be nonzero")
    yh = y / ny
    A = _basis(X, S1, cache)
    B = _basis(X, S2, cache)
    vals, vecs = projection_difference_eig(A, B)
    keep = np.abs(vals) > 1e-13
    if not np.any(keep):
        return 1.0  # identical spans: no prediction difference anywhere
    lam = vals[keep]
    V = vecs[:, keep]

    # Work inside span(V) + span(yh); directions outside contribute nothing
    # to the objective and only waste norm.
    resid = yh - V @ (V.T @ yh)
    rn = float(np.linalg.norm(resid))
    if rn > 1e-10:
        W = np.column_stack([V, resid / rn])
    else:
        W = V
    T = V.T @ W
    M = T.T @ (lam[:, None] ** 2 * T)  # the squared difference, restricted
    M = 0.5 * (M + M.T)
    yw = W.T @ yh

    mu, U = np.linalg.eigh(M)
    mu = np.clip(mu, 0.0, None)
    mu_max = mu[-1]
    top = mu >= mu_max - (1e-12 + 1e-9 * mu_max)
    ptop = float(np.linalg.norm(U[:, top].T @ yw))
    c = float(np.cos(angle))
    if ptop >= c - 1e-12:
        return float(np.clip(1.0 - mu_max, 0.0, 1.0))

    a = float(yw @ M @ yw)
    s2 = max(0.0, 1.0 - c * c)
    if s2 <= 0.0 or W.shape[1] == 1:
        return float(np.clip(1.0 - a, 0.0, 1.0))
    s = np.sqrt(s2)
    Q, _ = np.linalg.qr(np.column_stack([yw, np.eye(len(yw))]))
    Z = Q[:, 1 : len(yw)]
    b = (c * s) * (Z.T @ (M @ yw))
    Ahat = s2 * (Z.T @ M @ Z)
    Ahat = 0.5 * (Ahat + Ahat.T)
    g = _max_quad_lin_sphere(Ahat, b)
    return float(np.clip(1.0 - (c * c * a + g), 0.0, 1.0))


def _max_quad_lin_sphere(A: np.ndarray, b: np.ndarray) -> float:
    """Maximize u'Au + 2b'u over the unit sphere (small dense problem)."""
    nu, R = np.linalg.eigh(A)
    lmax = float(nu[-1])
    bb = R.T @ b
    top = nu >= lmax - (1e-12 + 1e-9 * abs(lmax))
    rest = ~top
    btop2 = float(np.sum(bb[top] ** 2))
    btot = float(np.sqrt(np.sum(bb * bb)))

    def value_at(t: float) -> float:
        u = bb / (t - nu)
        return float(u @ (nu * u) + 2.0 * (bb @ u))

    if btot <= 1e-14:
        return lmax  # pure eigen problem

    def phi(t: float) -> float:
        return float(np.sum((bb / (t - nu)) ** 2)) - 1.0

    if btop2 > 1e-28:
        lo = lmax + np.sqrt(btop2) * (1.0 - 1e-9)
        hi = lmax + btot * (1.0 + 1e-12)
        if phi(hi) > 0.0:  # guard against rounding at the bracket edge
            hi = lmax + btot * 2.0
        t_star = brentq(phi, lo, hi, xtol=1e-14 * max(1.0, abs(lmax)))
        return value_at(t_star)

    # hard case: no linear mass on the top eigenspace
    bb_r = bb[rest]
    nu_r = nu[rest]
    if bb_r.size == 0:
        return lmax
    phi_rest_at_lmax = float(np.sum((bb_r / (lmax - nu_r)) ** 2))
    if phi_rest_at_lmax > 1.0:

        def phi_r(t: float) -> float:
            return float(np.sum((bb_r / (t - nu_r)) ** 2)) - 1.0

        hi = lmax + float(np.sqrt(np.sum(bb_r**2))) * (1.0 + 1e-12)
        lo = lmax + 1e-14 * max(1.0, abs(lmax))
        if phi_r(lo) <= 0.0:
            t_star = lo
        else:
            t_star = brentq(phi_r, lo, hi, xtol=1e-14 * max(1.0, abs(lmax)))
        u_r = bb_r / (t_star - nu_r)
        return float(u_r @ (nu_r * u_r) + 2.0 * (bb_r @ u_r))
    u_r = bb_r / (lmax - nu_r)
    fill2 = max(0.0, 1.0 - float(u_r @ u_r))
    return float(u_r @ (nu_r * u_r) + 2.0 * (bb_r @ u_r) + lmax * fill2)


# ---------------------------------------------------------------------------
# error decomposition and stability
# ---------------------------------------------------------------------------


def true_false_positives(X: DesignMatrix, S_hat, S_star, cache: BasisCache | None = None):
    """Subspace-valued true and false positive counts of a selection.

    The true positive count is the similarity between the selected set and
    the target set; the false positive count is the remaining size,
    |S_hat| - TP.  Both vary continuously with the correlation structure.
    """
    S_hat = as_feature_set(S_hat)
    tp = subspace_similarity(X, S_hat, S_star, cache)
    tp = float(np.clip(tp, 0.0, len(S_hat)))
    return tp, float(len(S_hat) - tp)


def set_stability(
    S,
    P: AvgProjection,
    cache: BasisCache | None = None,
    rank_rtol: float = DEFAULT_RANK_RTOL,
) -> float:
    """Stability of a feature set against the subsample average projection.

    The smallest average alignment over unit directions in the set's span:
    high only when every direction of the span is consistently covered by
    the subsample selections.  Empty set: 1.  Rank-deficient set: 0.
    Shrinking a set can only raise this value.
    """
    S = as_feature_set(S)
    if not S:
        return 1.0
    if P.design is None and cache is None:
        raise ValueError("need the design (P.design or a cache) to span the set")
    X = cache.X if cache is not None else P.design
    basis = _basis(X, S, cache) if cache is not None else orthonormal_basis(X, S, rank_rtol)
    if basis.rank < len(S):
        log.debug("rank-deficient feature set %s: stability forced to 0", S)
        return 0.0
    return worst_alignment(basis, P)


def is_maximal_stable(
    S,
    P: AvgProjection,
    alpha: float,
    cache: BasisCache | None = None,
) -> bool:
    """Whether ``S`` is stable at level alpha and no one-feature extension is.

    True only if the set itself reaches the threshold while every superset
    obtained by adding one more feature falls below it.
    """
    S = as_feature_set(S)
    X = cache.X if cache is not None else P.design
    if X is None:
        raise ValueError("need the design (P.design or a cache) to span sets")
    if set_stability(S, P, cache) < alpha:
        return False
    for j in range(X.p):
        if j in S:
            continue
        if set_stability(S + (j,), P, cache) >= alpha:
            return False
    return True


def output_stability(X: DesignMatrix, models, cache: BasisCache | None = None) -> float:
    """Mean pairwise normalized similarity across a collection of models.

    Fewer than two models: 1 by convention.
    """
    models = [as_feature_set(S) for S in models]
    m = len(models)
    if m < 2:
        return 1.0
    tot = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            tot += normalized_similarity(X, models[i], models[j], cache)
    return tot / (m * (m - 1) / 2)
