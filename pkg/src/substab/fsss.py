"""Search for maximal stable feature sets.

A feature set is stable when every direction of its span is consistently
covered by the subsample selections (its stability reaches the threshold),
and maximal when no single added feature keeps it stable.  Because
stability only decreases as a set grows, the stable family is closed under
taking subsets, and maximal stable sets are the leaves worth reporting.

The search restarts random walks from the empty set: each step extends the
current set by one screened candidate, sampled proportionally to how well
its residual direction aligns with the average projection.  Walks prune
through shared memories of found maximal sets and of dead extensions, so
repeated restarts eventually exhaust the reachable family; with enough
restarts the walk provably returns every maximal stable set.  The greedy
variant replaces sampling with the argmax and is fully deterministic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .linalg import DEFAULT_RANK_RTOL, AvgProjection, DesignMatrix
from .metrics import BasisCache, set_stability
from .util import as_feature_set, check_alpha, substream

__all__ = ["SearchState", "StableModel", "SearchResult", "candidate_set", "fsss", "enumerate_all_maximal"]

log = logging.getLogger(__name__)


@dataclass
class SearchState:
    """Shared memory of one search: found sets, dead ends and caches."""

    cache: BasisCache
    max_stable: dict[tuple[int, ...], float] = field(default_factory=dict)
    visited: set[tuple[int, ...]] = field(default_factory=set)
    pi_cache: dict[tuple[int, ...], float] = field(default_factory=dict)
    corr2: np.ndarray | None = None
    pi_evaluations: int = 0
    restarts: int = 0

    def has_superset_in_max_stable(self, S: tuple[int, ...]) -> bool:
        s = set(S)
        return any(s < set(M) for M in self.max_stable)


@dataclass(frozen=True)
class StableModel:
    features: tuple[int, ...]
    stability: float
    names: tuple[str, ...]


@dataclass
class SearchResult:
    """Maximal stable sets in discovery order, plus search diagnostics."""

    models: list[StableModel]
    exhausted: bool
    restarts: int
    pi_evaluations: int
    alpha: float
    K: int
    mode: str
    seed: int

    @property
    def feature_sets(self) -> list[tuple[int, ...]]:
        return [m.features for m in self.models]


def _pi(S, P, state: SearchState) -> float:
    val = state.pi_cache.get(S)
    if val is None:
        val = set_stability(S, P, state.cache)
        state.pi_cache[S] = val
        state.pi_evaluations += 1
    return val


def _corr2_matrix(X: DesignMatrix) -> np.ndarray:
    norms = np.linalg.norm(X.values, axis=0)
    safe = np.where(norms > 0, norms, 1.0)
    C = (X.values / safe).T @ (X.values / safe)
    C[norms == 0, :] = 0.0
    C[:, norms == 0] = 0.0
    return C * C


def candidate_set(
    X: DesignMatrix,
    S,
    P: AvgProjection,
    alpha: float,
    state: SearchState,
    corr_guard: float | None = None,
):
    """Screened one-feature extensions of ``S`` with their sampling weights.

    A feature j qualifies when the extended set is not already a found
    maximal set or a known dead end, the residual of X_j on span(S) is not
    negligible, and the average alignment of that residual reaches
    ``alpha``.  The alignment also upper-bounds the stability of the
    extended set, so discarded candidates can never form stable extensions.
    With ``corr_guard`` set, features too correlated with a member of ``S``
    (squared correlation above the guard) are excluded as well.

    Returns ``(indices, weights)`` as aligned arrays sorted by index.
    """
    S = as_feature_set(S)
    basis = state.cache.get(S)
    V = X.values - basis.matrix @ (basis.matrix.T @ X.values)
    v_norm2 = np.einsum("ij,ij->j", V, V)
    x_norm2 = np.einsum("ij,ij->j", X.values, X.values)
    W = P.stacked.T @ V
    align_num = np.einsum("ij,ij->j", W, W)

    rtol = state.cache.rank_rtol
    in_S = np.zeros(X.p, dtype=bool)
    for j in S:
        in_S[j] = True

    if corr_guard is not None and state.corr2 is None:
        state.corr2 = _corr2_matrix(X)

    idx = []
    wts = []
    for j in range(X.p):
        if in_S[j]:
            continue
        if v_norm2[j] <= (rtol * rtol) * x_norm2[j] or v_norm2[j] <= 0.0:
            continue
        T = _extend(S, j)
        if T in state.visited or T in state.max_stable:
            continue
        w = align_num[j] / (v_norm2[j] * P.count)
        if w < alpha:
            continue
        if corr_guard is not None and S and np.max(state.corr2[j, list(S)]) > corr_guard:
            continue
        idx.append(j)
        wts.append(min(w, 1.0))
    return np.asarray(idx, dtype=np.int64), np.asarray(wts, dtype=np.float64)


def _extend(S: tuple[int, ...], j: int) -> tuple[int, ...]:
    out = list(S)
    out.append(j)
    out.sort()
    return tuple(out)


def fsss(
    X: DesignMatrix,
    P: AvgProjection,
    alpha: float,
    K: int = 1,
    seed: int = 0,
    mode: str = "walk",
    corr_guard: float | None = None,
    restart_budget: int | None = None,
    max_pi_evaluations: int = 1_000_000,
    rank_rtol: float = DEFAULT_RANK_RTOL,
) -> SearchResult:
    """Collect up to K maximal stable feature sets.

    Restarted random walks extend from the empty set until no screened
    candidate remains, recording each terminal set as a new maximal model
    (or a dead end when a superset was already found).  The search returns
    early with ``exhausted=True`` once the empty set itself has no
    candidates left: at that point every maximal stable set has been
    found, so fewer than K models is a certificate that no more exist.

    ``mode="greedy"`` takes the best-aligned candidate at every step
    (lowest index on ties) instead of sampling; it is deterministic and
    only supports K=1.  ``corr_guard`` optionally refuses extensions whose
    squared correlation with a member of the current set exceeds the
    guard.  Exceeding ``max_pi_evaluations`` raises RuntimeError: the
    search is making no progress worth waiting for.
    """
    alpha = check_alpha(alpha)
    if mode not in ("walk", "greedy"):
        raise ValueError(f"mode must be 'walk' or 'greedy', got {mode!r}")
    if K < 1:
        raise ValueError("K must be at least 1")
    if mode == "greedy" and K != 1:
        raise ValueError("greedy mode is deterministic and supports only K=1")
    if P.design is None:
        P = AvgProjection(P.bases, design=X)
    budget = restart_budget if restart_budget is not None else max(50 * K, 1000)
    rng = substream(seed, "walk")
    state = SearchState(cache=BasisCache(X, rank_rtol))
    discovery: list[tuple[int, ...]] = []
    exhausted = False

    while len(state.max_stable) < K and state.restarts < budget:
        state.restarts += 1
        S: tuple[int, ...] = ()
        while True:
            idx, wts = candidate_set(X, S, P, alpha, state, corr_guard)
            extended = False
            alive = np.ones(idx.size, dtype=bool)
            while np.any(alive):
                if state.pi_evaluations > max_pi_evaluations:
                    raise RuntimeError(
                        f"stability evaluation budget exceeded "
                        f"({max_pi_evaluations}); reached {len(state.max_stable)} "
                        f"models in {state.restarts} restarts"
                    )
                live = np.flatnonzero(alive)
                if mode == "greedy":
                    pick = live[int(np.argmax(wts[live]))]
                else:
                    w = wts[live]
                    pick = int(rng.choice(live, p=w / w.sum()))
                j = int(idx[pick])
                T = _extend(S, j)
                if state.has_superset_in_max_stable(T) or _pi(T, P, state) >= alpha:
                    S = T
                    extended = True
                    break
                state.visited.add(T)
                alive[pick] = False
            if extended:
                continue
            # no candidate worked: S is fully explored
            if not S:
                exhausted = True
                break
            if state.has_superset_in_max_stable(S):
                state.visited.add(S)
            else:
                state.max_stable[S] = _pi(S, P, state)
                discovery.append(S)
            break
        if exhausted:
            break

    if not exhausted and len(state.max_stable) < K:
        log.warning(
            "restart budget (%d) hit with %d of %d models found",
            budget,
            len(state.max_stable),
            K,
        )

    names = X.column_names
    models = [
        StableModel(
            features=S,
            stability=state.max_stable[S],
            names=tuple(names[j] for j in S),
        )
        for S in discovery
    ]
    return SearchResult(
        models=models,
        exhausted=exhausted,
        restarts=state.restarts,
        pi_evaluations=state.pi_evaluations,
        alpha=alpha,
        K=K,
        mode=mode,
        seed=int(seed),
    )


def enumerate_all_maximal(
    X: DesignMatrix,
    P: AvgProjection,
    alpha: float,
    rank_rtol: float = DEFAULT_RANK_RTOL,
) -> list[tuple[int, ...]]:
    """Every maximal stable feature set, by exhausting the stable family.

    Since stability never increases when a set grows, the stable family is
    subset-closed and can be walked with increasing-index extensions only.
    A member is maximal when no one-feature extension stays in the family.
    Exponential in the worst case: meant for small p (oracles and tests).
    """
    alpha = check_alpha(alpha)
    if P.design is None:
        P = AvgProjection(P.bases, design=X)
    cache = BasisCache(X, rank_rtol)
    pi_cache: dict[tuple[int, ...], float] = {}

    def pi(S: tuple[int, ...]) -> float:
        val = pi_cache.get(S)
        if val is None:
            val = set_stability(S, P, cache)
            pi_cache[S] = val
        return val

    stable: set[tuple[int, ...]] = {()}
    stack: list[tuple[int, ...]] = [()]
    while stack:
        S = stack.pop()
        start = (S[-1] + 1) if S else 0
        for j in range(start, X.p):
            T = S + (j,)
            if T not in stable and pi(T) >= alpha:
                stable.add(T)
                stack.append(T)

    maximal = []
    for S in stable:
        if not S:
            continue
        if not any(_extend(S, j) in stable for j in range(X.p) if j not in S):
            maximal.append(S)
    return sorted(maximal)
