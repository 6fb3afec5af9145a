"""Base selection procedures fitted on subsamples.

Two procedures, both returning a feature set of target size ``s0``:

* ``l0``: greedy forward selection on the residual plus best-exchange
  refinement rounds.
* ``lasso``: cyclic coordinate descent over a decreasing penalty path,
  stopping at the first penalty whose active set reaches ``s0``.

Inputs must be centered; columns are rescaled to unit norm internally, so
selection is scale-free.  The heavy loops live in the kernel backends; see
``_accel`` for how the numba and numpy paths are chosen.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._accel import get_kernels
from .util import as_feature_set

__all__ = ["BaseProcedureConfig", "fit_l0", "fit_lasso", "fit_base", "lasso_cd_solve"]

log = logging.getLogger(__name__)

_SCORE_RTOL = 1e-10  # forward selection stops when no scaled score exceeds this
_RANK_TOL = 1e-8  # unit-norm residual below this counts as linearly dependent


@dataclass(frozen=True)
class BaseProcedureConfig:
    """Which base procedure to run on each subsample, and its knobs."""

    kind: str = "l0"  # "l0" or "lasso"
    s0: int = 10
    swap_rounds: int = 2
    path_length: int = 100
    eps_ratio: float = 1e-3
    max_sweeps: int = 1000
    cd_tol: float = 1e-7

    def __post_init__(self):
        if self.kind not in ("l0", "lasso"):
            raise ValueError(f"unknown base procedure kind: {self.kind!r}")
        if self.s0 < 1:
            raise ValueError("s0 must be at least 1")


def _standardize_columns(X: np.ndarray):
    """Unit-norm columns in Fortran order; zero-variance columns become zero."""
    X = np.asarray(X, dtype=np.float64)
    norms = np.linalg.norm(X, axis=0)
    out = np.array(X, order="F", copy=True)
    nz = norms > 0
    out[:, nz] /= norms[nz]
    return out, norms


def fit_l0(X_sub: np.ndarray, y_sub: np.ndarray, s0: int, swap_rounds: int = 2):
    """Support of size <= s0 from forward selection plus exchange rounds.

    Each forward step adds the feature with the largest squared correlation
    with the current residual (lowest index on ties) and refits; each
    exchange round applies the best strictly RSS-reducing single swap.
    Stops early when no feature can reduce the RSS, so the support size
    equals the rank of the design when that is below ``s0``.
    """
    y = np.asarray(y_sub, dtype=np.float64).ravel()
    Xs, _ = _standardize_columns(X_sub)
    score_tol = _SCORE_RTOL * max(1.0, float(np.linalg.norm(y)))
    sel = get_kernels().l0_forward_swap(Xs, y, int(s0), int(swap_rounds), score_tol, _RANK_TOL)
    return as_feature_set(sel)


def fit_lasso(
    X_sub: np.ndarray,
    y_sub: np.ndarray,
    s0: int,
    path_length: int = 100,
    eps_ratio: float = 1e-3,
    max_sweeps: int = 1000,
    cd_tol: float = 1e-7,
):
    """Support of size s0 from the first penalty whose active set reaches s0.

    Solves (1/2n)||y - X b||^2 + lam*||b||_1 by coordinate descent along a
    log-spaced penalty path from lam_max = max_j |X_j'y|/n downward, with
    warm starts.  The active set at the largest penalty with at least s0
    features is truncated to the s0 largest coefficients in magnitude
    (lowest index on ties).  If the path never reaches s0 features the
    final active set is returned and a warning is logged.
    """
    y = np.asarray(y_sub, dtype=np.float64).ravel()
    Xs, _ = _standardize_columns(X_sub)
    n, m = Xs.shape
    cj = np.sum(Xs * Xs, axis=0) / n
    lam_max = float(np.max(np.abs(Xs.T @ y))) / n if m else 0.0
    if lam_max <= 0.0:
        return ()
    lams = np.geomspace(lam_max, eps_ratio * lam_max, int(path_length))
    kern = get_kernels()
    beta = np.zeros(m)
    for lam in lams:
        kern.lasso_cd(Xs, y, float(lam), beta, cj, int(max_sweeps), float(cd_tol))
        active = np.flatnonzero(beta)
        if active.size >= s0:
            order = np.lexsort((active, -np.abs(beta[active])))
            return as_feature_set(active[order[:s0]])
    active = np.flatnonzero(beta)
    log.warning(
        "lasso path exhausted with %d active features (target %d)", active.size, s0
    )
    return as_feature_set(active)


def fit_base(X_sub: np.ndarray, y_sub: np.ndarray, config: BaseProcedureConfig):
    """Run the configured base procedure on one (centered) subsample."""
    if config.kind == "l0":
        return fit_l0(X_sub, y_sub, config.s0, config.swap_rounds)
    return fit_lasso(
        X_sub,
        y_sub,
        config.s0,
        path_length=config.path_length,
        eps_ratio=config.eps_ratio,
        max_sweeps=config.max_sweeps,
        cd_tol=config.cd_tol,
    )


def lasso_cd_solve(
    X_sub: np.ndarray,
    y_sub: np.ndarray,
    lam: float,
    max_sweeps: int = 1000,
    cd_tol: float = 1e-10,
):
    """Single-penalty coordinate descent solve, in the standardized scale.

    Returns the coefficient vector for the unit-norm column scaling; mainly
    a hook for verifying the solver against closed forms.
    """
    y = np.asarray(y_sub, dtype=np.float64).ravel()
    Xs, _ = _standardize_columns(X_sub)
    n, m = Xs.shape
    cj = np.sum(Xs * Xs, axis=0) / n
    beta = np.zeros(m)
    get_kernels().lasso_cd(Xs, y, float(lam), beta, cj, int(max_sweeps), float(cd_tol))
    return beta
