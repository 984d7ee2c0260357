"""Dense two-phase simplex with Bland's anti-cycling rule.

Solves ``min c @ x`` subject to ``A @ x = b`` and ``x >= 0``. Sized for the
small LPs in this package (tens of rows, a few hundred columns); the pivot
loop lives in :mod:`greedy_entropy.kernels`.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import LpBudgetExceeded, SolverFailure

PIVOT_TOL = 1e-10


@dataclass(frozen=True)
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    fun: float
    iterations: int
    infeasibility: float = 0.0


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i] -= T[i, col] * T[row]
    basis[row] = col


def linprog_bland(c, A, b, feas_tol=1e-9, max_iter=None, budget=200_000):
    """Solve a standard-form LP.

    ``feas_tol`` bounds the phase-I objective (sum of artificials) for the
    problem to count as feasible. ``budget`` caps ``rows * cols`` of the
    tableau and raises :class:`LpBudgetExceeded` beyond it.
    """
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    m, n = A.shape
    if (m + 1) * (n + m + 1) > budget:
        raise LpBudgetExceeded(f"LP of size {m}x{n} exceeds budget {budget}")
    if max_iter is None:
        max_iter = 50 * (m + n) + 100
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = np.arange(n, n + m, dtype=np.intp)

    status, it1 = kernels.simplex_iterate(T, basis, n + m, max_iter, PIVOT_TOL)
    if status != kernels.SIMPLEX_OPTIMAL:
        raise SolverFailure("phase I did not reach optimality")
    infeas = max(-T[m, -1], 0.0)
    if infeas > feas_tol:
        return LpResult("infeasible", None, np.inf, it1, infeas)

    # drive zero-level artificials out of the basis; drop redundant rows
    keep = []
    for i in range(m):
        if basis[i] >= n:
            cand = np.flatnonzero(np.abs(T[i, :n]) > 1e-9)
            if cand.size:
                _pivot(T, basis, i, int(cand[0]))
                keep.append(i)
        else:
            keep.append(i)
    rows = np.asarray(keep, dtype=np.intp)
    T2 = np.empty((rows.size + 1, n + 1))
    T2[:-1, :n] = T[rows, :n]
    T2[:-1, -1] = T[rows, -1]
    basis2 = np.ascontiguousarray(basis[rows])
    cb = c[basis2]
    T2[-1, :n] = c - cb @ T2[:-1, :n]
    T2[-1, -1] = -cb @ T2[:-1, -1]

    status, it2 = kernels.simplex_iterate(T2, basis2, n, max_iter, PIVOT_TOL)
    if status == kernels.SIMPLEX_UNBOUNDED:
        return LpResult("unbounded", None, -np.inf, it1 + it2, infeas)
    if status != kernels.SIMPLEX_OPTIMAL:
        raise SolverFailure("phase II hit the iteration limit")
    x = np.zeros(n)
    x[basis2] = np.maximum(T2[:-1, -1], 0.0)
    return LpResult("optimal", x, float(c @ x), it1 + it2, infeas)
