"""Finite-difference solvers for ``-div(a grad u) = f`` with zero Dirichlet data.

1D uses the conservative three-point scheme with half-node coefficients and a
tridiagonal solve; 2D uses the five-point stencil on a uniform grid of
``[0, 1]^2`` solved by preconditioned conjugate gradients. Snapshots are
embedded in a weighted Euclidean space whose norm is the discrete H^1 norm.
"""
import csv
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps

from . import kernels
from .errors import IterationBudgetExceeded, SingularSystem
from .greedy_rbm import PointCloud
from .linalg_core import AmbientSpace

log = logging.getLogger(__name__)

CG_RTOL = 1e-10


# -- 1D -------------------------------------------------------------------------


def _sample(v, x):
    if callable(v):
        return np.array(np.broadcast_to(v(x), x.shape), dtype=float)
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0:
        return np.full(x.shape, float(arr))
    return arr.copy()


@dataclass(eq=False)
class EllipticProblem1D:
    """``a`` is a callable or its values on all ``grid_n + 2`` nodes;
    ``f`` a callable or values on the ``grid_n`` interior nodes."""

    grid_n: int
    a: object
    f: object
    averaging: str = "harmonic"
    a_min: float = 0.0

    def __post_init__(self):
        if self.grid_n < 1:
            raise ValueError("grid_n must be >= 1")
        if self.averaging not in ("harmonic", "midpoint"):
            raise ValueError("averaging must be 'harmonic' or 'midpoint'")
        an = self.nodes_a()
        if an.shape != (self.grid_n + 2,):
            raise ValueError(f"a needs {self.grid_n + 2} nodal values")
        floor = max(self.a_min, 0.0)
        if not np.all(an > floor):
            raise ValueError(f"coefficient must exceed a_min = {floor} on the grid")

    @property
    def h(self):
        return 1.0 / (self.grid_n + 1)

    @property
    def x(self):
        return np.arange(1, self.grid_n + 1) * self.h

    def nodes_a(self):
        return _sample(self.a, np.arange(self.grid_n + 2) * self.h)

    def half_a(self):
        """Coefficient at the ``grid_n + 1`` half nodes."""
        if self.averaging == "midpoint" and callable(self.a):
            return _sample(self.a, (np.arange(self.grid_n + 1) + 0.5) * self.h)
        an = self.nodes_a()
        if self.averaging == "midpoint":
            return 0.5 * (an[:-1] + an[1:])
        return 2.0 * an[:-1] * an[1:] / (an[:-1] + an[1:])

    def rhs(self):
        fv = _sample(self.f, self.x)
        if fv.shape != (self.grid_n,):
            raise ValueError(f"f needs {self.grid_n} interior values")
        return fv


def solve_1d(prob):
    """Nodal solution on the interior grid (boundary values are zero)."""
    n, h = prob.grid_n, prob.h
    ah = prob.half_a()
    diag = (ah[:-1] + ah[1:]) / h ** 2
    off = -ah[1:-1] / h ** 2
    sub = np.concatenate([[0.0], off])
    sup = np.concatenate([off, [0.0]])
    try:
        return kernels.thomas_solve(sub, diag, sup, np.ascontiguousarray(prob.rhs()))
    except ZeroDivisionError as e:
        raise SingularSystem(str(e)) from None


def h1_embedding_1d(u, h):
    """``[u_1..u_N, u_1 - u_0, ..., u_{N+1} - u_N]`` with the H^1 weights."""
    u = np.asarray(u, dtype=float)
    full = np.concatenate([[0.0], u, [0.0]])
    return np.concatenate([u, np.diff(full)])


def h1_space_1d(grid_n):
    h = 1.0 / (grid_n + 1)
    w = np.concatenate([np.full(grid_n, h), np.full(grid_n + 1, 1.0 / h)])
    return AmbientSpace.euclidean(2 * grid_n + 1, w)


def h1_norm_1d(u, h):
    """``sqrt(sum h u_i^2 + sum (u_{i+1} - u_i)^2 / h)``."""
    full = np.concatenate([[0.0], np.asarray(u, dtype=float), [0.0]])
    return math.sqrt(h * float(full @ full) + float(np.sum(np.diff(full) ** 2)) / h)


# -- 2D -------------------------------------------------------------------------


@dataclass(eq=False)
class EllipticProblem2D:
    """Nodal coefficient on the ``(grid_n + 2)^2`` grid including boundary.

    Each node carries the value of its dual cell; face coefficients are
    harmonic means of the two nodes they join.
    """

    grid_n: int
    a: np.ndarray
    f: object
    a_min: float = 0.0

    def __post_init__(self):
        A = np.asarray(self.a, dtype=float)
        m = self.grid_n + 2
        if A.shape != (m, m):
            raise ValueError(f"a needs shape ({m}, {m})")
        if not np.all(A > max(self.a_min, 0.0)):
            raise ValueError("coefficient must be positive")
        self.a = A

    @property
    def h(self):
        return 1.0 / (self.grid_n + 1)

    def mesh(self):
        t = np.arange(1, self.grid_n + 1) * self.h
        return np.meshgrid(t, t, indexing="ij")

    def rhs(self):
        X, Y = self.mesh()
        if callable(self.f):
            return np.asarray(np.broadcast_to(self.f(X, Y), X.shape), dtype=float)
        return np.asarray(np.broadcast_to(np.asarray(self.f, dtype=float), X.shape), dtype=float)


def _harm(a, b):
    return 2.0 * a * b / (a + b)


def assemble_2d(prob):
    """Sparse SPD matrix of the five-point operator (row-major ``(i, j)``)."""
    n, h = prob.grid_n, prob.h
    A = prob.a
    ax = _harm(A[:-1, 1:-1], A[1:, 1:-1])  # faces between x-neighbours, (n+1, n)
    ay = _harm(A[1:-1, :-1], A[1:-1, 1:])  # faces between y-neighbours, (n, n+1)
    diag = (ax[:-1, :] + ax[1:, :] + ay[:, :-1] + ay[:, 1:]) / h ** 2
    idx = np.arange(n * n).reshape(n, n)
    rows = [idx.ravel()]
    cols = [idx.ravel()]
    vals = [diag.ravel()]
    # x-neighbours (i, j) -- (i+1, j)
    cx = -ax[1:-1, :] / h ** 2
    for r, c in ((idx[:-1, :], idx[1:, :]), (idx[1:, :], idx[:-1, :])):
        rows.append(r.ravel())
        cols.append(c.ravel())
        vals.append(cx.ravel())
    cy = -ay[:, 1:-1] / h ** 2
    for r, c in ((idx[:, :-1], idx[:, 1:]), (idx[:, 1:], idx[:, :-1])):
        rows.append(r.ravel())
        cols.append(c.ravel())
        vals.append(cy.ravel())
    M = sps.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n * n, n * n)
    )
    return M


def conjugate_gradient(M, b, rtol=CG_RTOL, max_iter=None):
    """Jacobi-preconditioned CG; stops at ``||b - M x|| <= rtol ||b||``."""
    n = b.size
    max_iter = 10 * n if max_iter is None else max_iter
    x = np.zeros(n)
    bn = float(np.linalg.norm(b))
    if bn == 0.0:
        return x, 0
    dinv = 1.0 / M.diagonal()
    r = b.copy()
    z = dinv * r
    p = z.copy()
    rz = float(r @ z)
    for it in range(1, max_iter + 1):
        Mp = M @ p
        alpha = rz / float(p @ Mp)
        x += alpha * p
        r -= alpha * Mp
        if np.linalg.norm(r) <= rtol * bn:
            # confirm against the true residual
            if np.linalg.norm(b - M @ x) <= rtol * bn:
                return x, it
            r = b - M @ x
        z = dinv * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise IterationBudgetExceeded(f"CG did not reach rtol {rtol} in {max_iter} iterations")


def solve_2d(prob, rtol=CG_RTOL, max_iter=None):
    """Nodal solution as an ``(grid_n, grid_n)`` array indexed ``[i_x, i_y]``."""
    M = assemble_2d(prob)
    u, _ = conjugate_gradient(M, prob.rhs().ravel(), rtol, max_iter)
    return u.reshape(prob.grid_n, prob.grid_n)


def h1_embedding_2d(U):
    n = U.shape[0]
    full = np.zeros((n + 2, n + 2))
    full[1:-1, 1:-1] = U
    dx = np.diff(full[:, 1:-1], axis=0)  # (n+1, n)
    dy = np.diff(full[1:-1, :], axis=1)  # (n, n+1)
    return np.concatenate([U.ravel(), dx.ravel(), dy.ravel()])


def h1_space_2d(grid_n):
    h = 1.0 / (grid_n + 1)
    nu = grid_n * grid_n
    nd = 2 * grid_n * (grid_n + 1)
    w = np.concatenate([np.full(nu, h * h), np.ones(nd)])
    return AmbientSpace.euclidean(nu + nd, w)


# -- coefficient families ---------------------------------------------------------


@dataclass(frozen=True)
class CoefficientFamily:
    """Random coefficient families.

    ``HOLDER``: ``a = M0 + 1 + 0.9 g / G`` with
    ``g = sum_{j<=J} xi_j j^{-s-1/2} cos(j pi x)``, ``xi_j ~ U[-1, 1]`` and
    ``G = sum j^{-s-1/2}``, so ``a >= M0 + 0.1``; the oscillating part is
    shrunk if the proxy norm ``max|a| + sum |coef_j| (j pi)^s`` exceeds
    ``M1``. ``GEOMETRIC``: ``a = 2`` above the curve ``y = phi(x)`` and 1
    below, with ``phi = 0.5 + 0.35 g / G`` clipped to ``[0, 1]``.
    """

    kind: str = "HOLDER"
    s: float = 2.0
    terms: int = 32
    M0: float = 1.0
    M1: float = 1e6
    seed: int = 0
    sample_count: int = 64

    def __post_init__(self):
        if self.kind not in ("HOLDER", "GEOMETRIC"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.s <= 0 or self.terms < 1 or self.sample_count < 1:
            raise ValueError("s, terms and sample_count must be positive")
        if self.M0 <= 0:
            raise ValueError("M0 must be positive")

    def describe(self):
        return (f"{self.kind}(s={self.s:g},terms={self.terms},M0={self.M0:g},"
                f"M1={self.M1:g},seed={self.seed},count={self.sample_count})")

    def _series(self, i):
        rng = np.random.default_rng([self.seed, i])
        j = np.arange(1, self.terms + 1)
        xi = rng.uniform(-1.0, 1.0, self.terms)
        dec = j ** (-self.s - 0.5)
        return j, xi * dec, dec.sum()

    def proxy_norm(self, coef, amax):
        j = np.arange(1, coef.size + 1)
        return float(amax + np.sum(np.abs(coef) * (j * math.pi) ** self.s))

    def coefficient(self, i):
        """Callable ``a(x)`` (1D, HOLDER) or ``phi(x)`` (GEOMETRIC)."""
        j, c, G = self._series(i)
        if self.kind == "HOLDER":
            scale = 0.9 / G
            amax = self.M0 + 1.9
            if self.proxy_norm(scale * c, amax) > self.M1:
                room = max(self.M1 - amax, 0.0)
                scale *= room / max(self.proxy_norm(scale * c, 0.0), 1e-300)
            coef = scale * c
            base = self.M0 + 1.0
            return lambda x: base + np.cos(np.multiply.outer(np.asarray(x), j) * math.pi) @ coef
        coef = 0.35 * c / G
        return lambda x: np.clip(0.5 + np.cos(np.multiply.outer(np.asarray(x), j) * math.pi) @ coef, 0.0, 1.0)

    def geometric_field(self, i, grid_n):
        """Nodal coefficient of the geometric model on the full grid."""
        phi = self.coefficient(i)
        t = np.arange(grid_n + 2) / (grid_n + 1)
        X, Y = np.meshgrid(t, t, indexing="ij")
        return np.where(Y >= phi(X), 2.0, 1.0)


@dataclass
class ManifoldReport:
    requested: int = 0
    failed: list = field(default_factory=list)


def sample_manifold(fam, grid_n=199, rhs=1.0, report=None):
    """Snapshots ``u(a_i)`` as a point cloud in the discrete H^1 norm.

    HOLDER families are solved in 1D, GEOMETRIC ones in 2D. A sample whose
    solve fails is logged, recorded in ``report.failed`` and left out.
    """
    report = report if report is not None else ManifoldReport()
    report.requested = fam.sample_count
    rows, labels = [], []
    for i in range(fam.sample_count):
        try:
            if fam.kind == "HOLDER":
                prob = EllipticProblem1D(grid_n, fam.coefficient(i), rhs, a_min=fam.M0)
                rows.append(h1_embedding_1d(solve_1d(prob), prob.h))
            else:
                prob = EllipticProblem2D(grid_n, fam.geometric_field(i, grid_n), rhs)
                rows.append(h1_embedding_2d(solve_2d(prob)))
            labels.append({"index": i, "seed": fam.seed})
        except (SingularSystem, IterationBudgetExceeded, ValueError) as e:
            log.warning("sample %d failed: %s", i, e)
            report.failed.append(i)
    sp = h1_space_1d(grid_n) if fam.kind == "HOLDER" else h1_space_2d(grid_n)
    return PointCloud(np.array(rows).reshape(-1, sp.dim), sp, labels)


# -- snapshot files -----------------------------------------------------------------


def snapshots_to_csv(cloud, grid_n, family, seed):
    """Self-describing CSV: ``#`` header lines, then one row per snapshot."""
    buf = io.StringIO()
    buf.write(f"# grid_n={grid_n}\n")
    buf.write(f"# norm=H1 weighted-euclidean dim={cloud.space.dim}\n")
    buf.write(f"# family={family}\n")
    buf.write(f"# seed={seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index"] + [f"c{k}" for k in range(cloud.space.dim)])
    for lab, row in zip(cloud.labels or range(cloud.m), cloud.points):
        idx = lab["index"] if isinstance(lab, dict) else lab
        w.writerow([idx] + [repr(float(v)) for v in row])
    return buf.getvalue()


def write_snapshots(path, cloud, grid_n, family, seed):
    with open(path, "w", newline="") as fh:
        fh.write(snapshots_to_csv(cloud, grid_n, family, seed))


def read_snapshots(path):
    """Inverse of :func:`write_snapshots`; returns ``(cloud, meta)``."""
    meta = {}
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for ln in lines:
        if ln.startswith("#"):
            k, _, v = ln[1:].strip().partition("=")
            meta[k.strip()] = v.strip()
        else:
            body.append(ln)
    rows = list(csv.reader(body))[1:]
    grid_n = int(meta["grid_n"])
    pts = np.array([[float(v) for v in r[1:]] for r in rows])
    labels = [{"index": int(r[0]), "seed": int(meta["seed"])} for r in rows]
    dim = pts.shape[1] if pts.size else 0
    sp = h1_space_1d(grid_n) if dim == 2 * grid_n + 1 else h1_space_2d(grid_n)
    return PointCloud(pts, sp, labels), meta


# -- perturbation bound ------------------------------------------------------------


def _lq_norm(v, h, q):
    """Discrete ``L_q`` norm of half-node values (cell width ``h``)."""
    v = np.abs(np.asarray(v, dtype=float))
    if math.isinf(q):
        return float(v.max())
    return float((h * np.sum(v ** q)) ** (1.0 / q))


def perturbation_check(a1, a2, f, p_exp, grid_n=199):
    """Both sides of the coefficient-perturbation bound on the 1D grid.

    Left: ``||u(a1) - u(a2)||_{H^1}``. Right (without the unknown constant):
    ``||u(a1)'||_{L_p} ||a1 - a2||_{L_q}`` with ``q = 2p/(p-2)``. Derivatives
    and coefficient differences live on half nodes.
    """
    if p_exp < 2:
        raise ValueError("p must be >= 2")
    q = math.inf if p_exp == 2 else 2.0 * p_exp / (p_exp - 2.0)
    P1 = EllipticProblem1D(grid_n, a1, f)
    P2 = EllipticProblem1D(grid_n, a2, f)
    u1, u2 = solve_1d(P1), solve_1d(P2)
    h = P1.h
    left = h1_norm_1d(u1 - u2, h)
    du = np.diff(np.concatenate([[0.0], u1, [0.0]])) / h
    grad = _lq_norm(du, h, p_exp)
    da = _lq_norm(P1.half_a() - P2.half_a(), h, q)
    right = grad * da
    ratio = left / right if right > 0 else (0.0 if left == 0 else math.inf)
    return {"left": left, "right": right, "ratio": ratio, "p": float(p_exp), "q": q,
            "grad_lp": grad, "coef_lq": da}


def perturbation_family(fam, pairs=100, p_exp=2.0, grid_n=199, rhs=1.0):
    """Ratios over ``pairs`` coefficient pairs ``(2k, 2k+1)`` of a HOLDER family."""
    out = []
    for k in range(pairs):
        r = perturbation_check(fam.coefficient(2 * k), fam.coefficient(2 * k + 1), rhs, p_exp, grid_n)
        out.append(r["ratio"])
    arr = np.asarray(out)
    med = float(np.median(arr))
    return {
        "ratios": arr.tolist(),
        "max": float(arr.max()),
        "median": med,
        "finite": bool(np.all(np.isfinite(arr))),
        "spread_ok": bool(med > 0 and arr.max() / med <= 50.0),
    }
