"""Numba-compiled fitting kernels.

Same contracts as ``_kernels_numpy``: Fortran-ordered ``X`` with centered,
unit-norm columns (zero-variance columns all-zero), centered ``y``.
Selection order, tie-breaking and stopping rules match the numpy versions;
only the floating-point op order differs.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _mgs_rows(X, cols, rank_tol, out):
    """Fill rows of ``out`` with an orthonormal basis of the listed columns.

    Two Gram-Schmidt passes per column; columns whose residual norm falls
    at or below ``rank_tol`` are skipped.  Returns the basis size.
    """
    n = X.shape[0]
    t = 0
    for idx in range(cols.shape[0]):
        q = X[:, cols[idx]].copy()
        for _ in range(2):
            for s in range(t):
                c = np.dot(out[s], q)
                for i in range(n):
                    q[i] -= c * out[s, i]
        nrm = np.sqrt(np.dot(q, q))
        if nrm <= rank_tol:
            continue
        for i in range(n):
            out[t, i] = q[i] / nrm
        t += 1
    return t


@njit(cache=True)
def _deflate(rows, t, v):
    """Subtract from ``v`` its projection onto the first ``t`` rows."""
    n = v.shape[0]
    for s in range(t):
        c = np.dot(rows[s], v)
        for i in range(n):
            v[i] -= c * rows[s, i]


@njit(cache=True)
def l0_forward_swap(X, y, s0, swap_rounds, score_tol, rank_tol):
    n, m = X.shape
    if s0 > m:
        s0 = m
    QT = np.zeros((s0, n))
    sel = np.zeros(s0, np.int64)
    in_model = np.zeros(m, np.bool_)
    dead = np.zeros(m, np.bool_)
    r = y.copy()
    k = 0
    while k < s0:
        xtr = np.dot(X.T, r)
        best = score_tol
        j = -1
        for jj in range(m):
            if in_model[jj] or dead[jj]:
                continue
            v = abs(xtr[jj])
            if v > best:
                best = v
                j = jj
        if j < 0:
            break
        q = X[:, j].copy()
        for _ in range(2):
            _deflate(QT, k, q)
        nrm = np.sqrt(np.dot(q, q))
        if nrm <= rank_tol:
            dead[j] = True
            continue
        for i in range(n):
            QT[k, i] = q[i] / nrm
        sel[k] = j
        in_model[j] = True
        c = np.dot(QT[k], r)
        for i in range(n):
            r[i] -= c * QT[k, i]
        k += 1

    if k < 2 or swap_rounds <= 0:
        return sel[:k].copy()

    keep = np.zeros(k - 1, np.int64)
    Qk = np.zeros((k - 1, n))
    for _ in range(swap_rounds):
        rss_cur = np.dot(r, r)
        best_rss = rss_cur - 1e-12
        best_drop = -1
        best_j = -1
        for ii in range(k):
            t = 0
            for q_ in range(k):
                if q_ != ii:
                    keep[t] = sel[q_]
                    t += 1
            kb = _mgs_rows(X, keep, rank_tol, Qk)
            yt = y.copy()
            _deflate(Qk, kb, yt)
            rss_i = np.dot(yt, yt)
            G = np.dot(Qk[:kb], X)
            cross = np.dot(X.T, yt)
            for jj in range(m):
                if in_model[jj]:
                    continue
                s2 = 1.0
                for s in range(kb):
                    s2 -= G[s, jj] * G[s, jj]
                if s2 <= rank_tol * rank_tol:
                    continue
                rss_new = rss_i - cross[jj] * cross[jj] / s2
                if rss_new < best_rss:
                    best_rss = rss_new
                    best_drop = ii
                    best_j = jj
        if best_drop < 0:
            break
        in_model[sel[best_drop]] = False
        in_model[best_j] = True
        sel[best_drop] = best_j
        _mgs_rows(X, sel[:k], rank_tol, QT)
        r = y.copy()
        _deflate(QT, k, r)

    return sel[:k].copy()


@njit(cache=True)
def lasso_cd(X, y, lam, beta, cj, max_sweeps, tol):
    n, m = X.shape
    r = y - np.dot(X, beta)
    for sweep in range(max_sweeps):
        dmax = 0.0
        for j in range(m):
            if cj[j] <= 0.0:
                continue
            bj = beta[j]
            rho = np.dot(X[:, j], r) / n + cj[j] * bj
            if rho > lam:
                nb = (rho - lam) / cj[j]
            elif rho < -lam:
                nb = (rho + lam) / cj[j]
            else:
                nb = 0.0
            d = nb - bj
            if d != 0.0:
                for i in range(n):
                    r[i] -= d * X[i, j]
                beta[j] = nb
                ad = abs(d)
                if ad > dmax:
                    dmax = ad
        if dmax <= tol:
            return sweep + 1
    return max_sweeps
