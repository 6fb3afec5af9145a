"""Experiment harness: the three-fold tuning protocol and benchmark metrics.

One repetition draws a training set, splits it into three folds, and for
each method: selects features by subsampling the first fold, estimates
least-squares coefficients for the selected set on the second fold, and
picks tuning values (stability threshold, clustering cutoff) by mean
squared error on the third fold.  Test error and subspace-based
true/false positives are then computed against a fresh test draw and the
generating truth.  Output stability of a method is the average pairwise
normalized similarity of the models it selects across extra independent
trials, with spans taken in a fixed reference design so models from
different trials are comparable.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd

from .baselines import (
    cluster_selection_proportions,
    hierarchical_clusters,
    selection_proportions,
    stability_selection,
    cluster_stability_selection_sps,
)
from .baseproc import BaseProcedureConfig, fit_base
from .fsss import fsss
from .linalg import AvgProjection, DesignMatrix
from .metrics import (
    BasisCache,
    normalized_similarity,
    output_stability,
    response_similarity,
    set_stability,
    true_false_positives,
    worst_case_similarity,
)
from .subsampling import make_plan, run_subsampling
from .synthetic import GroundTruth
from .util import as_feature_set, substream

__all__ = [
    "ExperimentConfig",
    "MetricRow",
    "METHODS",
    "fit_and_score",
    "run_experiment",
    "aggregate",
    "compute_output_stability",
    "summary_table",
    "stability_paths",
    "tile_similarity",
]

log = logging.getLogger(__name__)

METHODS = ("l0", "lasso", "ss", "css", "fsss_greedy", "fsss")

_STABILITY_METHODS = ("ss", "css", "fsss_greedy", "fsss")


@dataclass(frozen=True)
class ExperimentConfig:
    """Protocol settings for one benchmark run."""

    methods: tuple[str, ...] = ("l0", "ss", "css", "fsss_greedy")
    s0_grid: tuple[int, ...] = (12, 16, 24, 35)
    alpha_grid: tuple[float, ...] = (0.8, 0.85, 0.9, 0.95)
    h_grid: tuple[float, ...] = (0.1, 0.3, 0.5)
    B: int = 100
    fold_sizes: tuple[int, int, int] = (200, 200, 200)
    test_size: int = 500
    repetitions: int = 20
    os_trials: int = 10
    base_kind: str = "l0"
    seed: int = 0
    workers: int | None = None

    def __post_init__(self):
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if not self.methods or not self.s0_grid or not self.alpha_grid or not self.h_grid:
            raise ValueError("methods and tuning grids must be nonempty")
        if len(self.fold_sizes) != 3 or any(f < 2 for f in self.fold_sizes):
            raise ValueError("need three folds of at least two rows each")
        if self.B % 2 != 0 or self.B < 2:
            raise ValueError("subsample count must be even and positive")

    @property
    def n_train(self) -> int:
        return sum(self.fold_sizes)


@dataclass(frozen=True)
class MetricRow:
    """Per-repetition scores of one method at one sparsity level."""

    method: str
    s0: int
    repetition: int
    mse: float
    tp: float
    fp: float
    model_size: int
    alpha: float
    cut_height: float
    selected: tuple[int, ...]


def _ols_coefficients(X_rows: np.ndarray, y_rows: np.ndarray, S) -> tuple[float, np.ndarray]:
    """Least-squares intercept and coefficients of y on the selected columns."""
    S = as_feature_set(S)
    ybar = float(y_rows.mean())
    if not S:
        return ybar, np.zeros(0)
    Z = X_rows[:, S]
    zbar = Z.mean(axis=0)
    coef, *_ = np.linalg.lstsq(Z - zbar, y_rows - ybar, rcond=None)
    return ybar - float(zbar @ coef), coef


def _predict(X_rows: np.ndarray, S, intercept: float, coef: np.ndarray) -> np.ndarray:
    S = as_feature_set(S)
    if not S:
        return np.full(X_rows.shape[0], intercept)
    return intercept + X_rows[:, S] @ coef


def _mse(X_rows, y_rows, S, intercept, coef) -> float:
    resid = y_rows - _predict(X_rows, S, intercept, coef)
    return float(resid @ resid / resid.size)


def _candidate_selections(
    method: str,
    X1: DesignMatrix,
    records,
    P: AvgProjection,
    config: ExperimentConfig,
    rep_seed: int,
) -> list[tuple[float, float, tuple[int, ...]]]:
    """All (alpha, cut_height, selection) candidates the validation fold chooses from."""
    if method == "ss":
        return [
            (a, np.nan, stability_selection(records, X1.p, a)) for a in config.alpha_grid
        ]
    if method == "css":
        out = []
        for h in config.h_grid:
            clusters = hierarchical_clusters(X1, h)
            for a in config.alpha_grid:
                out.append(
                    (a, h, cluster_stability_selection_sps(X1, records, a, h, clusters=clusters))
                )
        return out
    if method in ("fsss_greedy", "fsss"):
        mode = "greedy" if method == "fsss_greedy" else "walk"
        out = []
        for a in config.alpha_grid:
            res = fsss(X1, P, alpha=a, K=1, seed=rep_seed, mode=mode)
            S = res.models[0].features if res.models else ()
            out.append((a, np.nan, S))
        return out
    raise ValueError(f"not a stability method: {method}")


def fit_and_score(
    X: DesignMatrix,
    y: np.ndarray,
    folds: tuple[np.ndarray, np.ndarray, np.ndarray],
    X_test: DesignMatrix,
    y_test: np.ndarray,
    method: str,
    s0: int,
    config: ExperimentConfig,
    truth: GroundTruth | None = None,
    repetition: int = 0,
    rep_seed: int = 0,
    shared: dict | None = None,
) -> MetricRow:
    """Select on fold 1, estimate on fold 2, tune on fold 3, score on test data.

    ``shared`` optionally memoizes the subsampling of fold 1 per sparsity
    level so every stability method scores the same subsample selections.
    An empty selection falls back to the intercept-only predictor.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    f1, f2, f3 = folds
    if len(set(f1) & set(f2)) or len(set(f1) & set(f3)) or len(set(f2) & set(f3)):
        raise ValueError("folds must be disjoint")
    base = BaseProcedureConfig(kind=config.base_kind, s0=s0)

    alpha_used = np.nan
    h_used = np.nan
    if method in ("l0", "lasso"):
        kind = "l0" if method == "l0" else "lasso"
        X1 = DesignMatrix.from_array(X.values[f1])
        S_hat = fit_base(X1.values, y[f1] - y[f1].mean(), replace(base, kind=kind))
    else:
        key = ("subs", int(s0))
        if shared is not None and key in shared:
            X1, records, P = shared[key]
        else:
            X1 = DesignMatrix.from_array(X.values[f1])
            plan = make_plan(len(f1), config.B, seed=rep_seed)
            records, P = run_subsampling(X1, y[f1], plan, base, workers=config.workers)
            if shared is not None:
                shared[key] = (X1, records, P)
        candidates = _candidate_selections(method, X1, records, P, config, rep_seed)
        best = None
        for a, h, S in candidates:
            intercept, coef = _ols_coefficients(X.values[f2], y[f2], S)
            val = _mse(X.values[f3], y[f3], S, intercept, coef)
            if best is None or val < best[0]:
                best = (val, a, h, S)
        _, alpha_used, h_used, S_hat = best

    intercept, coef = _ols_coefficients(X.values[f2], y[f2], S_hat)
    test_mse = _mse(X_test.values, y_test, S_hat, intercept, coef)
    if truth is not None:
        tp, fp = true_false_positives(X, S_hat, truth.support)
    else:
        tp, fp = np.nan, np.nan
    return MetricRow(
        method=method,
        s0=int(s0),
        repetition=int(repetition),
        mse=test_mse,
        tp=tp,
        fp=fp,
        model_size=len(S_hat),
        alpha=alpha_used,
        cut_height=h_used,
        selected=S_hat,
    )


def _fold_indices(fold_sizes: tuple[int, int, int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    edges = np.cumsum((0,) + tuple(fold_sizes))
    return tuple(np.arange(edges[i], edges[i + 1]) for i in range(3))


def _rep_seeds(config: ExperimentConfig, count: int) -> list[tuple[int, int]]:
    rng = substream(config.seed, "plan")
    draws = rng.integers(0, 2**31 - 1, size=(count, 2))
    return [(int(a), int(b)) for a, b in draws]


def run_experiment(make_data, config: ExperimentConfig) -> pd.DataFrame:
    """Repetition sweep over methods and sparsity levels; one tidy row each.

    ``make_data(seed, n)`` must return ``(X, y, truth)`` drawn from the
    benchmark distribution.  All randomness derives from ``config.seed``.
    """
    folds = _fold_indices(config.fold_sizes)
    rows = []
    for rep, (train_seed, test_seed) in enumerate(_rep_seeds(config, config.repetitions)):
        X, y, truth = make_data(train_seed, config.n_train)
        X_test, y_test, _ = make_data(test_seed, config.test_size)
        for s0 in config.s0_grid:
            shared: dict = {}
            for method in config.methods:
                row = fit_and_score(
                    X,
                    y,
                    folds,
                    X_test,
                    y_test,
                    method,
                    s0,
                    config,
                    truth=truth,
                    repetition=rep,
                    rep_seed=train_seed,
                    shared=shared,
                )
                rows.append(row.__dict__)
    df = pd.DataFrame(rows)
    df["selected"] = df["selected"].map(tuple)
    return df


def aggregate(per_rep: pd.DataFrame) -> pd.DataFrame:
    """Mean and standard deviation of every score, per method and sparsity level."""
    metrics = ["mse", "tp", "fp", "model_size"]
    g = per_rep.groupby(["method", "s0"])
    out = g[metrics].mean().rename(columns={m: f"{m}_mean" for m in metrics})
    std = g[metrics].std(ddof=0).rename(columns={m: f"{m}_std" for m in metrics})
    out = out.join(std)
    out["repetitions"] = g.size()
    return out.reset_index()


def compute_output_stability(
    make_data,
    method: str,
    s0: int,
    config: ExperimentConfig,
    reference: DesignMatrix | None = None,
) -> float:
    """Average pairwise normalized similarity of models across extra trials.

    Each trial reruns the full pipeline (fresh draw, three folds, tuning)
    for one method at one sparsity level; the similarity of the resulting
    feature sets is measured in a common reference design so that spans
    from different trials are comparable.
    """
    folds = _fold_indices(config.fold_sizes)
    rng = substream(config.seed, "oracle")
    ref_seed = int(rng.integers(0, 2**31 - 1))
    if reference is None:
        reference, _, _ = make_data(ref_seed, config.n_train)
    models = []
    for trial in range(config.os_trials):
        train_seed = int(rng.integers(0, 2**31 - 1))
        test_seed = int(rng.integers(0, 2**31 - 1))
        X, y, truth = make_data(train_seed, config.n_train)
        X_test, y_test, _ = make_data(test_seed, config.test_size)
        row = fit_and_score(
            X, y, folds, X_test, y_test, method, s0, config,
            truth=truth, repetition=trial, rep_seed=train_seed, shared={},
        )
        models.append(row.selected)
    return output_stability(reference, models)


def summary_table(make_data, config: ExperimentConfig, per_rep: pd.DataFrame | None = None) -> pd.DataFrame:
    """Each method at its own best sparsity level, with output stability.

    Best means lowest mean test error across the sweep; ties go to the
    smaller sparsity level.
    """
    if per_rep is None:
        per_rep = run_experiment(make_data, config)
    agg = aggregate(per_rep)
    rows = []
    for method in config.methods:
        sub = agg[agg["method"] == method].sort_values(["mse_mean", "s0"])
        best = sub.iloc[0]
        os_val = compute_output_stability(make_data, method, int(best["s0"]), config)
        row = dict(best)
        row["os"] = os_val
        rows.append(row)
    return pd.DataFrame(rows)


def stability_paths(
    X: DesignMatrix,
    y: np.ndarray,
    s0_grid,
    B: int,
    seed: int,
    base_kind: str = "l0",
    cut_height: float = 0.2,
    truth: GroundTruth | None = None,
) -> pd.DataFrame:
    """Per-feature stability values along the sparsity sweep, three ways.

    For every sparsity level: the plain selection proportion, the selection
    proportion of the feature's correlation cluster, and the subspace
    stability of the singleton set.  Labels come from the ground truth when
    given.  One subsampling plan is shared across the sweep so levels
    differ only in the base procedure's sparsity.
    """
    plan = make_plan(X.n, B, seed=seed)
    clusters = hierarchical_clusters(X, cut_height)
    cluster_of = np.empty(X.p, dtype=np.int64)
    for c, members in enumerate(clusters):
        for j in members:
            cluster_of[j] = c
    labels = truth.labels if truth is not None else ("?",) * X.p
    names = X.column_names
    cache = BasisCache(X)
    rows = []
    for s0 in s0_grid:
        base = BaseProcedureConfig(kind=base_kind, s0=int(s0))
        records, P = run_subsampling(X, y, plan, base)
        props = selection_proportions(records, X.p)
        cprops = cluster_selection_proportions(records, clusters)
        for j in range(X.p):
            rows.append(
                dict(
                    s0=int(s0),
                    feature=j,
                    name=names[j],
                    label=labels[j],
                    selection_proportion=props[j],
                    cluster_proportion=cprops[cluster_of[j]],
                    subspace_stability=set_stability((j,), P, cache),
                )
            )
    return pd.DataFrame(rows)


def tile_similarity(
    X: DesignMatrix,
    subsets,
    P: AvgProjection,
    alpha: float,
    y: np.ndarray | None = None,
) -> pd.DataFrame:
    """Pairwise similarity entries for sets that are not stable together.

    For every unordered pair of feature sets whose union is stable at
    ``alpha`` the entries stay blank; otherwise the row carries the
    size-normalized similarity, the worst-case similarity, and (when the
    response is given) the similarity of the fitted responses.
    """
    subsets = [as_feature_set(S) for S in subsets]
    cache = BasisCache(X)
    rows = []
    for i, j in itertools.combinations(range(len(subsets)), 2):
        union = as_feature_set(subsets[i] + subsets[j])
        joint = set_stability(union, P, cache) >= alpha
        row = dict(first=i, second=j, jointly_stable=joint,
                   tau_bar=np.nan, tau_min=np.nan, tau_response=np.nan)
        if not joint:
            row["tau_bar"] = normalized_similarity(X, subsets[i], subsets[j], cache)
            row["tau_min"] = worst_case_similarity(X, subsets[i], subsets[j], cache)
            if y is not None:
                row["tau_response"] = response_similarity(X, y, subsets[i], subsets[j], cache)
        rows.append(row)
    return pd.DataFrame(rows)
