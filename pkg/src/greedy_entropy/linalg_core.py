"""Normed-space primitives: weighted l_p norms, orthonormal bases, distances.

All vectors are plain 1-D ``numpy`` arrays in the ambient coordinates. A
weighted space with weights ``w`` is handled by mapping to unweighted
coordinates ``v * w**(1/p)``, in which the weighted norm is the plain l_p norm.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NotInnerProductSpace, RankDeficient, SolverFailure
from .simplex import linprog_bland

TOL_ORTHO = 1e-10
TOL_RANK = 1e-12
TOL_OPT = 1e-9
REORTH_RATIO = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class AmbientSpace:
    """``R^dim`` with a (weighted) l_p norm; ``p = 2`` is the Euclidean case."""

    dim: int
    p: float = 2.0
    weights: np.ndarray | None = None

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        p = float(self.p)
        if not (p >= 1.0):
            raise ValueError(f"p must be >= 1 or inf, got {self.p}")
        object.__setattr__(self, "p", p)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float).copy()
            if w.shape != (self.dim,):
                raise DimensionMismatch(f"weights must have shape ({self.dim},)")
            if not np.all(w > 0) or not np.all(np.isfinite(w)):
                raise ValueError("weights must be positive and finite")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)

    @classmethod
    def euclidean(cls, dim, weights=None):
        return cls(dim, 2.0, weights)

    @classmethod
    def lp(cls, dim, p, weights=None):
        return cls(dim, p, weights)

    @property
    def is_euclidean(self):
        return self.p == 2.0

    def __eq__(self, other):
        if not isinstance(other, AmbientSpace):
            return NotImplemented
        if self.dim != other.dim or self.p != other.p:
            return False
        if self.weights is None or other.weights is None:
            return self.weights is None and other.weights is None
        return bool(np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash((self.dim, self.p, None if self.weights is None else self.weights.tobytes()))

    def describe(self):
        p = "inf" if math.isinf(self.p) else f"{self.p:g}"
        return f"l{p}(R^{self.dim}){' weighted' if self.weights is not None else ''}"

    # coordinates ---------------------------------------------------------

    def _factor(self):
        if self.weights is None or math.isinf(self.p):
            return None
        return self.weights ** (1.0 / self.p)

    def to_flat(self, v):
        """Map into unweighted coordinates (works on vectors or row stacks)."""
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.dim:
            raise DimensionMismatch(f"expected trailing dimension {self.dim}, got {v.shape}")
        fac = self._factor()
        return v if fac is None else v * fac

    def from_flat(self, y):
        fac = self._factor()
        y = np.asarray(y, dtype=float)
        return y if fac is None else y / fac

    def check(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DimensionMismatch(f"vector of shape {v.shape} in {self.describe()}")
        if not np.all(np.isfinite(v)):
            raise ValueError("vector has non-finite entries")
        return v

    # norms ---------------------------------------------------------------

    def norm(self, v):
        return float(flat_norm(self.to_flat(v), self.p))

    def norms(self, V):
        """Row-wise norms of a ``(m, dim)`` stack."""
        return flat_norm(self.to_flat(V), self.p, axis=-1)

    def inner(self, u, v):
        self.require_inner_product()
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.weights is None:
            return float(u @ v)
        return float(np.sum(self.weights * u * v))

    def require_inner_product(self):
        if not self.is_euclidean:
            raise NotInnerProductSpace(f"{self.describe()} has no inner product")


def flat_norm(y, p, axis=None):
    a = np.abs(y)
    if p == 2.0:
        return np.sqrt(np.sum(a * a, axis=axis))
    if math.isinf(p):
        return np.max(a, axis=axis, initial=0.0)
    if p == 1.0:
        return np.sum(a, axis=axis)
    return np.sum(a ** p, axis=axis) ** (1.0 / p)


@dataclass(frozen=True, eq=False)
class OrthoBasis:
    """Orthonormal vectors, stored as rows in the space's flat coordinates."""

    space: AmbientSpace
    flat: np.ndarray = field(default=None)

    def __post_init__(self):
        self.space.require_inner_product()
        q = np.zeros((0, self.space.dim)) if self.flat is None else np.asarray(self.flat, dtype=float)
        q = q.reshape(-1, self.space.dim).copy()
        q.setflags(write=False)
        object.__setattr__(self, "flat", q)

    @classmethod
    def empty(cls, space):
        return cls(space)

    @property
    def count(self):
        return self.flat.shape[0]

    def __len__(self):
        return self.count

    @property
    def columns(self):
        """Basis vectors in ambient coordinates, one per row."""
        return self.space.from_flat(self.flat)

    def orthonormality_error(self):
        if self.count == 0:
            return 0.0
        G = self.flat @ self.flat.T
        return float(np.max(np.abs(G - np.eye(self.count))))


def _flat_residual(Q, y):
    """Residual of ``y`` against orthonormal rows ``Q`` (twice-is-enough)."""
    if Q.shape[0] == 0:
        return y.copy()
    r = y - (Q @ y) @ Q
    ny = np.linalg.norm(y)
    if np.linalg.norm(r) < REORTH_RATIO * ny:
        r = r - (Q @ r) @ Q
    return r


def project(b, v):
    """Orthogonal projection of ``v`` onto ``span(b)``.

    Returns ``(projection, residual)`` with ``projection + residual == v``.
    """
    sp = b.space
    sp.require_inner_product()
    v = sp.check(v)
    y = sp.to_flat(v)
    r = _flat_residual(b.flat, y)
    res = sp.from_flat(r)
    return v - res, res


def extend_basis(b, v):
    """Append the normalised residual of ``v`` to ``b``.

    Raises :class:`RankDeficient` when the residual norm is at most
    ``TOL_RANK * ||v||``.
    """
    sp = b.space
    sp.require_inner_product()
    v = sp.check(v)
    y = sp.to_flat(v)
    r = _flat_residual(b.flat, y)
    nr = float(np.linalg.norm(r))
    ny = float(np.linalg.norm(y))
    if ny == 0.0 or nr <= TOL_RANK * ny:
        raise RankDeficient(f"residual norm {nr:.3e} vs vector norm {ny:.3e}")
    return OrthoBasis(sp, np.vstack([b.flat, r / nr]))


def residual_norms(vectors, space):
    """Successive Gram-Schmidt residual norms ``||v_k - P_{k-1} v_k||``.

    A vector that is dependent on its predecessors contributes 0 and is not
    added to the basis.
    """
    b = OrthoBasis.empty(space)
    out = []
    for v in vectors:
        _, r = project(b, v)
        out.append(space.norm(r))
        try:
            b = extend_basis(b, v)
        except RankDeficient:
            out[-1] = 0.0
    return np.asarray(out)


# -- distance to a span in l_p ------------------------------------------------


@dataclass(frozen=True)
class DistInfo:
    value: float
    coefficients: np.ndarray
    method: str  # "lstsq" | "lp" | "newton"
    tolerance: float


def _dist_l1_linf(B, y, p):
    """LP for min_c ||y - B^T c||_p with p in {1, inf}; rows of B span."""
    k, d = B.shape
    if math.isinf(p):
        # vars [c+, c-, t, s1, s2]; B^T c - t + s1 = y ; -B^T c - t + s2 = -y
        n = 2 * k + 1 + 2 * d
        A = np.zeros((2 * d, n))
        A[:d, :k] = B.T
        A[:d, k:2 * k] = -B.T
        A[:d, 2 * k] = -1.0
        A[:d, 2 * k + 1:2 * k + 1 + d] = np.eye(d)
        A[d:, :k] = -B.T
        A[d:, k:2 * k] = B.T
        A[d:, 2 * k] = -1.0
        A[d:, 2 * k + 1 + d:] = np.eye(d)
        rhs = np.concatenate([y, -y])
        cost = np.zeros(n)
        cost[2 * k] = 1.0
    else:
        # vars [c+, c-, u+, u-]; B^T (c+ - c-) + u+ - u- = y
        n = 2 * k + 2 * d
        A = np.zeros((d, n))
        A[:, :k] = B.T
        A[:, k:2 * k] = -B.T
        A[:, 2 * k:2 * k + d] = np.eye(d)
        A[:, 2 * k + d:] = -np.eye(d)
        rhs = y
        cost = np.zeros(n)
        cost[2 * k:] = 1.0
    res = linprog_bland(cost, A, rhs)
    if res.status != "optimal":
        raise SolverFailure(f"distance LP ended with status {res.status}")
    c = res.x[:k] - res.x[k:2 * k]
    # report the norm actually attained by the returned coefficients
    value = float(flat_norm(y - c @ B, p))
    return value, c


def _dist_newton(B, y, p, max_iter=200):
    """Damped Newton on sum |y - B^T c|^p, started from least squares.

    Returns ``(value, coefficients, rel_tol)`` where ``rel_tol`` estimates the
    relative error of ``value`` from the last Newton decrement.
    """
    k = B.shape[0]
    c = np.linalg.lstsq(B.T, y, rcond=None)[0]
    floor = 1e-8 * max(float(np.max(np.abs(y))), 1e-300)

    def objective(cc):
        return float(np.sum(np.abs(y - cc @ B) ** p))

    F = objective(c)
    for _ in range(max_iter):
        if F == 0.0:
            return 0.0, c, 0.0
        r = y - c @ B
        a = np.abs(r)
        g = -p * B @ (np.sign(r) * a ** (p - 1.0))
        h = p * (p - 1.0) * np.maximum(a, floor) ** (p - 2.0)
        H = (B * h) @ B.T
        H[np.diag_indices(k)] += 1e-14 * np.trace(H) / k
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            step = -g
        dec = float(-g @ step)
        if dec <= 1e-15 * F:
            return F ** (1.0 / p), c, dec / (p * F)
        t = 1.0
        while t > 1e-12:
            Fn = objective(c + t * step)
            if Fn < F and Fn <= F - 1e-4 * t * dec:
                break
            t *= 0.5
        else:
            # descent no longer measurable in floating point
            return F ** (1.0 / p), c, dec / (p * F)
        c = c + t * step
        F = Fn
    return F ** (1.0 / p), c, math.inf


def _dist_dual(B, y, p):
    """Dual of min_c ||y - B^T c||_p: ``sup <y,z>``, ``||z||_q <= 1``, ``Bz = 0``.

    Returns ``(value, z)``; ``value`` is a lower bound attained by the
    feasible ``z`` (``None`` when the value is 0).
    """
    q = p / (p - 1.0)
    d = B.shape[1]
    _, sv, Vt = np.linalg.svd(B, full_matrices=True)
    rank = int(np.sum(sv > 1e-12 * max(sv.max(initial=0.0), 1e-300)))
    N = Vt[rank:].T  # orthonormal basis of the null space of B
    if N.shape[1] == 0 or d == 0:
        return 0.0, None
    a = N.T @ y
    na = float(a @ a)
    if na == 0.0:
        return 0.0, None
    w0 = a / na
    if N.shape[1] == 1:
        z = N @ w0
    else:
        # <y, N(w0 + M u)> = 1 for every u; minimise the q-norm over u
        _, _, Wt = np.linalg.svd(a[None, :], full_matrices=True)
        NM = N @ Wt[1:].T
        _, u, _ = _dist_newton(-NM.T, N @ w0, q)
        z = N @ w0 + NM @ u
    nz = float(flat_norm(z, q))
    if not nz > 0.0:
        return 0.0, None
    return 1.0 / nz, z / nz


def _primal_from_dual(B, y, p, val, z):
    """Coefficients whose residual has the shape ``sign(z)|z|^{q-1}`` of the dual optimum."""
    q = p / (p - 1.0)
    r = np.sign(z) * np.abs(z) ** (q - 1.0)
    r *= val / max(float(flat_norm(r, p)), 1e-300)
    c = np.linalg.lstsq(B.T, y - r, rcond=None)[0]
    return float(flat_norm(y - c @ B, p)), c


def dist_lp(basis_vectors, v, space, return_info=False):
    """``min_c ||v - sum_i c_i b_i||`` in the norm of ``space``.

    Exact least squares for p = 2, an LP for p in {1, inf}, and damped
    Newton on the p-th power objective otherwise (accurate to about
    ``TOL_OPT`` relative; the tolerance is reported in the info record).
    """
    v = space.check(v)
    B = np.asarray(basis_vectors, dtype=float).reshape(-1, space.dim)
    y = space.to_flat(v)
    Bf = space.to_flat(B) if B.shape[0] else B
    p = space.p
    if B.shape[0] == 0:
        info = DistInfo(float(flat_norm(y, p)), np.zeros(0), "empty", 0.0)
    elif p == 2.0:
        c, *_ = np.linalg.lstsq(Bf.T, y, rcond=None)
        info = DistInfo(float(np.linalg.norm(y - c @ Bf)), c, "lstsq", 0.0)
    elif p == 1.0 or math.isinf(p):
        val, c = _dist_l1_linf(Bf, y, p)
        info = DistInfo(val, c, "lp", 1e-9)
    else:
        val, c, rel = _dist_newton(Bf, y, p)
        if p < 2.0 and not rel <= 1e-12:
            # the primal Hessian degenerates for p < 2; bound the gap by the
            # smooth dual problem (an l_q regression with q > 2)
            dual, z = _dist_dual(Bf, y, p)
            if z is not None:
                v2, c2 = _primal_from_dual(Bf, y, p, dual, z)
                if v2 < val:
                    val, c = v2, c2
            # a gap at rounding level of ||y|| counts as converged (exact fits)
            gap = max(val - dual, 0.0)
            rel = 0.0 if gap <= 1e-12 * float(flat_norm(y, p)) else gap / val
        if not rel <= 1e-6:
            raise SolverFailure(f"l_{p:g} distance did not converge (rel. decrement {rel:.2e})")
        info = DistInfo(val, c, "newton", max(rel, 1e-15))
    return info if return_info else info.value
