"""Pure numpy implementations of the hot kernels.

Signatures mirror ``_kernels.pyx`` exactly; :mod:`lpmink.kernels` picks one
at import time.
"""
from itertools import combinations

import numpy as np


def enumerate_vertices(U, h, rank_tol, feas_tol, merge_tol):
    """Vertices of {x : U x <= h} by solving every n-subset of boundaries.

    Subsets whose matrix has smallest singular value below ``rank_tol`` are
    skipped. Returns an (m, n) array of distinct feasible points.
    """
    U = np.ascontiguousarray(U, dtype=float)
    h = np.ascontiguousarray(h, dtype=float)
    N, n = U.shape
    if N < n:
        return np.empty((0, n))
    idx = np.array(list(combinations(range(N), n)), dtype=np.intp)
    A = U[idx]
    b = h[idx]
    sv = np.linalg.svd(A, compute_uv=False)
    ok = sv[:, -1] > rank_tol
    if not ok.any():
        return np.empty((0, n))
    X = np.linalg.solve(A[ok], b[ok][..., None])[..., 0]
    viol = X @ U.T - h
    X = X[(viol <= feas_tol).all(axis=1)]
    return _dedupe(X, merge_tol)


def _dedupe(X, merge_tol):
    keep = []
    for x in X:
        for y in keep:
            if np.sqrt(((x - y) ** 2).sum()) <= merge_tol:
                break
        else:
            keep.append(x)
    if not keep:
        return np.empty((0, X.shape[1]))
    return np.array(keep)


def phi_terms(U, h, xi, alpha, p):
    """Value, gradient, Hessian of sum alpha_k (h_k - xi.u_k)^p and min slack.

    Returns ``(nan, None, None, min_slack)`` when some slack is not positive.
    """
    s = h - U @ xi
    smin = float(s.min())
    if smin <= 0.0:
        return float("nan"), None, None, smin
    sp = alpha * s ** p
    value = float(sp.sum())
    w1 = -p * sp / s
    grad = U.T @ w1
    w2 = p * (p - 1.0) * sp / (s * s)
    hess = (U * w2[:, None]).T @ U
    return value, grad, hess, smin
