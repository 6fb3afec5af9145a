"""Complementary half-subsampling and per-subsample selection.

A plan of B subsamples is drawn as B/2 disjoint pairs: each pair splits a
random permutation of the rows into two halves of floor(n/2) rows (one row
is left out of both halves when n is odd).  Running the plan fits the base
procedure on every subsample and collects one orthonormal basis per
selected set, aggregated into the average projection that the stability
measures consume.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .baseproc import BaseProcedureConfig, fit_base
from .linalg import DEFAULT_RANK_RTOL, AvgProjection, DesignMatrix
from .metrics import BasisCache
from .util import substream

__all__ = ["SubsamplePlan", "SelectionRecord", "make_plan", "run_subsampling"]


@dataclass(frozen=True)
class SubsamplePlan:
    """Fixed set of row subsets; subsample 2i and 2i+1 are complementary."""

    n: int
    rows: tuple[np.ndarray, ...]
    seed: int

    @property
    def count(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class SelectionRecord:
    """Outcome of the base procedure on one subsample."""

    subsample_index: int
    rows: np.ndarray
    selected: tuple[int, ...]


def make_plan(n: int, B: int, seed: int) -> SubsamplePlan:
    """Draw B/2 complementary half-subsample pairs of ``n`` rows.

    ``B`` must be even and positive.  Deterministic in ``seed``; the rows
    of each subsample are sorted, and consecutive subsamples (0,1), (2,3),
    ... are disjoint halves of one permutation.
    """
    if B < 2 or B % 2 != 0:
        raise ValueError("subsample count B must be a positive even number")
    h = n // 2
    if h < 1:
        raise ValueError("need at least two rows to split")
    rng = substream(seed, "plan")
    rows = []
    for _ in range(B // 2):
        perm = rng.permutation(n)
        rows.append(np.sort(perm[:h]).astype(np.int64))
        rows.append(np.sort(perm[h : 2 * h]).astype(np.int64))
    return SubsamplePlan(n=n, rows=tuple(rows), seed=int(seed))


def _workers_from_env() -> int:
    raw = os.environ.get("SUBSTAB_WORKERS", "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"SUBSTAB_WORKERS must be an integer, got {raw!r}") from exc
    return max(1, value)


def run_subsampling(
    X: DesignMatrix,
    y: np.ndarray,
    plan: SubsamplePlan,
    config: BaseProcedureConfig,
    workers: int | None = None,
    bases_rows: np.ndarray | None = None,
    rank_rtol: float = DEFAULT_RANK_RTOL,
):
    """Fit the base procedure on every planned subsample.

    Returns ``(records, P)`` where ``records`` lists the per-subsample
    selections in subsample order and ``P`` is the average projection over
    the selected-set subspaces.  Subsample fits are centered within the
    subsample.  Bases are spanned on all rows by default; pass
    ``bases_rows`` to estimate the subspaces on a held-out row subset
    instead (e.g. rows never touched by the selection fits).  Results do
    not depend on ``workers``.
    """
    if plan.n != X.n:
        raise ValueError("plan was drawn for a different row count")
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.shape[0] != X.n:
        raise ValueError("response length does not match the design")

    if workers is None:
        workers = _workers_from_env()

    def _fit_one(idx: int) -> SelectionRecord:
        r = plan.rows[idx]
        Xs = X.values[r]
        Xs = Xs - Xs.mean(axis=0)
        ys = y[r]
        ys = ys - ys.mean()
        selected = fit_base(Xs, ys, config)
        return SelectionRecord(subsample_index=idx, rows=r, selected=selected)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_fit_one, range(plan.count)))
    else:
        records = [_fit_one(i) for i in range(plan.count)]

    if bases_rows is None:
        X_bases = X
    else:
        bases_rows = np.asarray(bases_rows, dtype=np.int64)
        X_bases = DesignMatrix.from_array(X.values[bases_rows], X.column_names)
    cache = BasisCache(X_bases, rank_rtol)
    bases = [cache.get(rec.selected) for rec in records]
    P = AvgProjection(bases, design=X_bases)
    return records, P
