# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Mirrors ``_kernels_py`` function for function."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, pow, INFINITY, isinf

cnp.import_array()

SIMPLEX_OPTIMAL = 0
SIMPLEX_UNBOUNDED = 1
SIMPLEX_ITERLIMIT = 2


def thomas_solve(const double[::1] sub, const double[::1] diag, const double[::1] sup,
                 const double[::1] rhs):
    cdef Py_ssize_t n = diag.shape[0], i
    cdef double beta
    cdef double[::1] cp = np.empty(n)
    cdef double[::1] dp = np.empty(n)
    x_arr = np.empty(n)
    cdef double[::1] x = x_arr
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
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x_arr


cdef inline double _dist(const double[:, ::1] X, Py_ssize_t a, Py_ssize_t b, double p) nogil:
    cdef Py_ssize_t j, d = X.shape[1]
    cdef double s = 0.0, t
    if p == 2.0:
        for j in range(d):
            t = X[a, j] - X[b, j]
            s += t * t
        return sqrt(s)
    if isinf(p):
        for j in range(d):
            t = fabs(X[a, j] - X[b, j])
            if t > s:
                s = t
        return s
    if p == 1.0:
        for j in range(d):
            s += fabs(X[a, j] - X[b, j])
        return s
    for j in range(d):
        s += pow(fabs(X[a, j] - X[b, j]), p)
    return pow(s, 1.0 / p)


def farthest_point(const double[:, ::1] X, Py_ssize_t k, Py_ssize_t start, double p):
    cdef Py_ssize_t m = X.shape[0], i, j, nxt
    cdef double best, dd
    cdef double[::1] mind = np.empty(m)
    radii_arr = np.zeros(k)
    cdef double[::1] radii = radii_arr
    order = [start]
    for i in range(m):
        mind[i] = _dist(X, i, start, p)
    for j in range(k):
        nxt = 0
        best = mind[0]
        for i in range(1, m):
            if mind[i] > best:
                best = mind[i]
                nxt = i
        radii[j] = best
        if best <= 0.0:
            break
        order.append(nxt)
        if j == k - 1:
            break
        for i in range(m):
            dd = _dist(X, i, nxt, p)
            if dd < mind[i]:
                mind[i] = dd
    return np.asarray(order, dtype=np.intp), radii_arr


cdef double _chol_residual(const double[:, ::1] G, const double[::1] b, double fnorm2,
                           Py_ssize_t* idx, Py_ssize_t n, double tol,
                           double[:, ::1] L, double[::1] y, double[::1] row,
                           char* keep) nogil:
    cdef Py_ssize_t i, j, q, gj
    cdef double v, w, s, acc = 0.0
    for j in range(n):
        gj = idx[j]
        v = G[gj, gj]
        w = b[gj]
        for i in range(n):
            row[i] = 0.0
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
        keep[j] = 0
        if v > tol * G[gj, gj] and v > 0.0:
            keep[j] = 1
            for q in range(j):
                L[j, q] = row[q]
            L[j, j] = sqrt(v)
            y[j] = w / L[j, j]
            acc += y[j] * y[j]
    return fnorm2 - acc


def best_subset(const double[:, ::1] G, const double[::1] b, double fnorm2, Py_ssize_t n, double tol):
    cdef Py_ssize_t m = G.shape[0], i, j
    cdef long long count = 0
    cdef double r, best = INFINITY
    cdef Py_ssize_t[::1] idx = np.arange(n, dtype=np.intp)
    best_arr = np.arange(n, dtype=np.intp)
    cdef Py_ssize_t[::1] best_idx = best_arr
    cdef double[:, ::1] L = np.zeros((max(n, 1), max(n, 1)))
    cdef double[::1] y = np.zeros(max(n, 1))
    cdef double[::1] row = np.zeros(max(n, 1))
    keep_arr = np.zeros(max(n, 1), dtype=np.int8)
    cdef char[::1] keep = keep_arr
    if n > m:
        raise ValueError("subset size exceeds atom count")
    while True:
        count += 1
        r = _chol_residual(G, b, fnorm2, &idx[0], n, tol, L, y, row, &keep[0])
        if r < best:
            best = r
            for j in range(n):
                best_idx[j] = idx[j]
        # next combination in lexicographic order
        i = n - 1
        while i >= 0 and idx[i] == m - n + i:
            i -= 1
        if i < 0:
            break
        idx[i] += 1
        for j in range(i + 1, n):
            idx[j] = idx[j - 1] + 1
    if best < 0.0:
        best = 0.0
    return best, best_arr, count


def simplex_iterate(double[:, ::1] T, Py_ssize_t[::1] basis, Py_ssize_t n_allowed,
                    Py_ssize_t max_iter, double tol):
    cdef Py_ssize_t m = T.shape[0] - 1, ncol = T.shape[1]
    cdef Py_ssize_t it, i, j, enter, leave
    cdef double a, ratio, best_ratio, piv, f
    for it in range(max_iter):
        enter = -1
        for j in range(n_allowed):
            if T[m, j] < -tol:
                enter = j
                break
        if enter < 0:
            return SIMPLEX_OPTIMAL, it
        leave = -1
        best_ratio = INFINITY
        for i in range(m):
            a = T[i, enter]
            if a > tol:
                ratio = T[i, ncol - 1] / a
                if ratio < best_ratio - 1e-14 or (
                    ratio <= best_ratio + 1e-14 and leave >= 0 and basis[i] < basis[leave]
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            return SIMPLEX_UNBOUNDED, it
        piv = T[leave, enter]
        for j in range(ncol):
            T[leave, j] /= piv
        for i in range(m + 1):
            if i != leave:
                f = T[i, enter]
                if f != 0.0:
                    for j in range(ncol):
                        T[i, j] -= f * T[leave, j]
        basis[leave] = enter
    return SIMPLEX_ITERLIMIT, max_iter
