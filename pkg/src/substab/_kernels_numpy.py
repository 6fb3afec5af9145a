"""Pure-numpy fitting kernels.

Same contracts as ``_kernels_numba``; vectorized where it matters so the
fallback stays usable on real problem sizes.

Both kernels expect Fortran-ordered ``X`` with centered columns scaled to
unit norm (zero-variance columns passed as all-zero), and a centered ``y``.
"""

from __future__ import annotations

import numpy as np


def l0_forward_swap(X, y, s0, swap_rounds, score_tol, rank_tol):
    """Greedy forward selection plus best-exchange refinement.

    Forward pass adds, for up to ``s0`` steps, the feature whose squared
    correlation with the current residual is largest (lowest index wins
    ties), refitting on the enlarged support each step.  Each swap round
    then applies the single in-model/out-of-model exchange that reduces
    the residual sum of squares the most, if any exchange reduces it
    strictly.  Returns the selected indices in selection order.
    """
    n, m = X.shape
    s0 = min(int(s0), m)
    QT = np.zeros((s0, n))  # rows: orthonormal basis of the selected columns
    sel = np.zeros(s0, dtype=np.int64)
    in_model = np.zeros(m, dtype=bool)
    dead = np.zeros(m, dtype=bool)
    r = y.copy()
    k = 0
    while k < s0:
        scores = np.abs(X.T @ r)
        scores[in_model | dead] = -1.0
        j = int(np.argmax(scores))
        if scores[j] <= score_tol:
            break
        q = X[:, j] - QT[:k].T @ (QT[:k] @ X[:, j])
        q -= QT[:k].T @ (QT[:k] @ q)  # second pass, keeps the basis orthonormal
        nrm = float(np.sqrt(q @ q))
        if nrm <= rank_tol:
            dead[j] = True
            continue
        q /= nrm
        QT[k] = q
        sel[k] = j
        in_model[j] = True
        r = r - q * (q @ r)
        k += 1

    if k < 2 or swap_rounds <= 0:
        return sel[:k].copy()

    for _ in range(int(swap_rounds)):
        rss_cur = float(r @ r)
        best_drop = -1
        best_j = -1
        best_rss = rss_cur - 1e-12  # exchanges must strictly reduce the RSS
        for ii in range(k):
            QkT = _orthonormal_rows(X, np.delete(sel[:k], ii), rank_tol)
            yt = y - QkT.T @ (QkT @ y)
            rss_i = float(yt @ yt)
            G = QkT @ X
            resid_norm2 = 1.0 - np.einsum("ij,ij->j", G, G)
            cross = X.T @ yt
            with np.errstate(divide="ignore", invalid="ignore"):
                gains = cross * cross / resid_norm2
            gains[resid_norm2 <= rank_tol * rank_tol] = 0.0
            gains[in_model] = 0.0
            jj = int(np.argmax(gains))
            rss_new = rss_i - float(gains[jj])
            if rss_new < best_rss:
                best_rss = rss_new
                best_drop = ii
                best_j = jj
        if best_drop < 0:
            break
        in_model[sel[best_drop]] = False
        in_model[best_j] = True
        sel[best_drop] = best_j
        QT[:k] = _orthonormal_rows(X, sel[:k], rank_tol)
        r = y - QT[:k].T @ (QT[:k] @ y)

    return sel[:k].copy()


def _orthonormal_rows(X, cols, rank_tol):
    """Modified Gram-Schmidt basis (rows) for the listed columns of X."""
    n = X.shape[0]
    out = np.zeros((len(cols), n))
    t = 0
    for j in cols:
        q = X[:, j] - out[:t].T @ (out[:t] @ X[:, j])
        q -= out[:t].T @ (out[:t] @ q)
        nrm = float(np.sqrt(q @ q))
        if nrm <= rank_tol:
            continue
        out[t] = q / nrm
        t += 1
    return out[:t]


def lasso_cd(X, y, lam, beta, cj, max_sweeps, tol):
    """Cyclic coordinate descent for (1/2n)||y - X beta||^2 + lam*||beta||_1.

    ``beta`` is updated in place (warm starts); ``cj`` holds the per-column
    values ||X_j||^2 / n.  Returns the number of sweeps executed; fewer than
    ``max_sweeps`` means the max-norm change dropped below ``tol``.
    """
    n, m = X.shape
    r = y - X @ beta
    for sweep in range(int(max_sweeps)):
        dmax = 0.0
        for j in range(m):
            if cj[j] <= 0.0:
                continue
            bj = beta[j]
            rho = (X[:, j] @ r) / n + cj[j] * bj
            if rho > lam:
                nb = (rho - lam) / cj[j]
            elif rho < -lam:
                nb = (rho + lam) / cj[j]
            else:
                nb = 0.0
            d = nb - bj
            if d != 0.0:
                r -= d * X[:, j]
                beta[j] = nb
                ad = abs(d)
                if ad > dmax:
                    dmax = ad
        if dmax <= tol:
            return sweep + 1
    return int(max_sweeps)
