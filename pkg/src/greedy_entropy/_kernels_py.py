"""Pure-Python/NumPy reference versions of the compiled kernels.

Every function here has a twin with the same signature in ``_kernels.pyx``.
The two must agree to rounding; ``tests/test_kernels.py`` checks that.
"""
import math
from itertools import combinations

import numpy as np

SIMPLEX_OPTIMAL = 0
SIMPLEX_UNBOUNDED = 1
SIMPLEX_ITERLIMIT = 2


def thomas_solve(sub, diag, sup, rhs):
    """Solve a tridiagonal system; ``sub[0]`` and ``sup[-1]`` are ignored."""
    n = len(diag)
    cp = np.empty(n)
    dp = np.empty(n)
    beta = diag[0]
    if beta == 0.0:
        raise ZeroDivisionError("zero pivot in tridiagonal solve")
    cp[0] = sup[0] / beta if n > 1 else 0.0
    dp[0] = rhs[0] / beta
    for i in range(1, n):
        beta = diag[i] - sub[i] * cp[i - 1]
        if beta == 0.0:
            raise ZeroDivisionError("zero pivot in tridiagonal solve")
        cp[i] = sup[i] / beta if i < n - 1 else 0.0
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / beta
    x = np.empty(n)
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def _row_dist(X, c, p):
    diff = np.abs(X - c)
    if p == 2.0:
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))
    if math.isinf(p):
        return diff.max(axis=1)
    if p == 1.0:
        return diff.sum(axis=1)
    return (diff ** p).sum(axis=1) ** (1.0 / p)


def farthest_point(X, k, start, p):
    """Gonzalez farthest-point traversal.

    Returns ``(order, radii)``: ``order`` holds up to ``k + 1`` point indices
    (the ``k`` centres followed by the farthest remaining point) and
    ``radii[j]`` is the covering radius of the first ``j + 1`` centres.
    Ties go to the lowest index.
    """
    order = [start]
    mind = _row_dist(X, X[start], p)
    radii = np.zeros(k)
    for j in range(k):
        nxt = int(np.argmax(mind))
        radii[j] = mind[nxt]
        if mind[nxt] <= 0.0:
            break
        order.append(nxt)
        if j == k - 1:
            break
        mind = np.minimum(mind, _row_dist(X, X[nxt], p))
    return np.asarray(order, dtype=np.intp), radii


def _chol_residual(G, b, fnorm2, idx, tol):
    """Squared residual of projecting onto the atoms ``idx``.

    Cholesky with column skipping: a pivot below ``tol * G_jj`` marks the atom
    as dependent on earlier ones, and it is dropped.
    """
    n = len(idx)
    L = np.zeros((n, n))
    y = np.zeros(n)
    keep = np.zeros(n, dtype=bool)
    acc = 0.0
    for j in range(n):
        gj = idx[j]
        v = G[gj, gj]
        w = b[gj]
        row = np.zeros(n)
        for i in range(j):
            if not keep[i]:
                continue
            s = G[idx[i], gj]
            for q in range(i):
                if keep[q]:
                    s -= L[i, q] * row[q]
            row[i] = s / L[i, i]
            v -= row[i] * row[i]
            w -= row[i] * y[i]
        if v > tol * G[gj, gj] and v > 0.0:
            keep[j] = True
            L[j, :j] = row[:j]
            L[j, j] = math.sqrt(v)
            y[j] = w / L[j, j]
            acc += y[j] * y[j]
    return fnorm2 - acc


def best_subset(G, b, fnorm2, n, tol):
    """Exhaustive best ``n``-subset least squares from the Gram data.

    ``G`` is the atom Gram matrix, ``b`` the atom/target inner products.
    Returns ``(best_residual_sq, best_subset, count)``.
    """
    m = G.shape[0]
    best = math.inf
    best_idx = None
    count = 0
    for idx in combinations(range(m), n):
        count += 1
        r = _chol_residual(G, b, fnorm2, idx, tol)
        if r < best:
            best = r
            best_idx = idx
    return max(best, 0.0), np.asarray(best_idx, dtype=np.intp), count


def simplex_iterate(T, basis, n_allowed, max_iter, tol):
    """Bland's-rule primal simplex on a dense tableau, in place.

    ``T`` has the constraint rows first and the reduced-cost row last; the
    last column is the right-hand side. Only columns ``< n_allowed`` may
    enter. Returns ``(status, iterations)``.
    """
    m = T.shape[0] - 1
    obj = T[m]
    for it in range(max_iter):
        enter = -1
        for j in range(n_allowed):
            if obj[j] < -tol:
                enter = j
                break
        if enter < 0:
            return SIMPLEX_OPTIMAL, it
        leave = -1
        best_ratio = math.inf
        for i in range(m):
            a = T[i, enter]
            if a > tol:
                ratio = T[i, -1] / a
                if ratio < best_ratio - 1e-14 or (
                    ratio <= best_ratio + 1e-14 and leave >= 0 and basis[i] < basis[leave]
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            return SIMPLEX_UNBOUNDED, it
        piv = T[leave, enter]
        T[leave] /= piv
        for i in range(m + 1):
            if i != leave:
                f = T[i, enter]
                if f != 0.0:
                    T[i] -= f * T[leave]
        basis[leave] = enter
    return SIMPLEX_ITERLIMIT, max_iter
