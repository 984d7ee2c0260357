"""Orthogonal greedy approximation over a finite dictionary, with baselines.

OGA picks the atom most correlated with the residual and re-projects ``f``
onto the span of every atom picked so far. PGA and RGA are the cheaper pure
and relaxed updates. The rest of the module computes the quantities the OGA
error bounds are stated in: the variation norm (by LP), best n-term errors
(by enumeration), the sequence recurrence bound and the K-functional.
"""
import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    EmptySet,
    RankExhausted,
    SolverFailure,
)
from .linalg_core import TOL_OPT, TOL_RANK, AmbientSpace
from .simplex import linprog_bland

TIE_RTOL = 1e-12
TOL_LP = 1e-9
SUBSET_BUDGET = 10 ** 6
NEAR_EXACT = 1e-10  # relative squared residual below which subsets are re-ranked by lstsq


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Finite dictionary; rows of ``atoms`` are the elements ``g``."""

    atoms: np.ndarray
    space: AmbientSpace
    normalized: bool = True

    def __post_init__(self):
        A = np.array(self.atoms, dtype=float, ndmin=2)
        if A.size == 0:
            raise EmptySet("dictionary has no atoms")
        if A.shape[1] != self.space.dim:
            raise DimensionMismatch(f"atoms of dimension {A.shape[1]} in {self.space.describe()}")
        self.space.require_inner_product()
        nrm = self.space.norms(A)
        if np.any(nrm == 0):
            raise ValueError("atoms must be nonzero")
        if self.normalized and np.any(nrm > 1 + 1e-12):
            raise ValueError("normalized dictionary has an atom of norm > 1")
        A.setflags(write=False)
        object.__setattr__(self, "atoms", A)

    @classmethod
    def from_atoms(cls, atoms, space=None, normalize=True):
        A = np.array(atoms, dtype=float, ndmin=2)
        sp = space if space is not None else AmbientSpace.euclidean(A.shape[1])
        if normalize:
            A = A / sp.norms(A)[:, None]
        return cls(A, sp, normalize)

    def __len__(self):
        return self.atoms.shape[0]

    @property
    def flat(self):
        return self.space.to_flat(self.atoms)


@dataclass(eq=False)
class OgaTrace:
    selected: list
    residual_norms: list
    coefficients: np.ndarray
    inner_products: list
    algorithm: str  # "OGA" | "WEAK_OGA" | "PGA" | "RGA"
    gamma: float = 1.0
    seed: int | None = None
    stop_cause: str | None = None
    skipped: int = 0
    # per OGA step: ||g_n - P_{n-1} g_n|| and the one-step recursion slack
    proj_norms: list = field(default_factory=list)
    recursion_slack: list = field(default_factory=list)

    def to_dict(self):
        return {
            "algorithm": self.algorithm,
            "gamma": float(self.gamma),
            "seed": self.seed,
            "selected": [int(i) for i in self.selected],
            "residual_norms": [float(r) for r in self.residual_norms],
            "inner_products": [float(v) for v in self.inner_products],
            "coefficients": [float(c) for c in np.ravel(self.coefficients)],
            "stop_cause": self.stop_cause,
            "skipped": int(self.skipped),
            "proj_norms": [float(v) for v in self.proj_norms],
            "recursion_slack": [float(v) for v in self.recursion_slack],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        d["coefficients"] = np.asarray(d["coefficients"])
        return cls(**d)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "atom_index", "inner_product", "residual_norm"])
        w.writerow([0, "", "", repr(float(self.residual_norms[0]))])
        for k, (i, v) in enumerate(zip(self.selected, self.inner_products), start=1):
            w.writerow([k, int(i), repr(float(v)), repr(float(self.residual_norms[k]))])
        return buf.getvalue()


def _check_target(D, f):
    f = D.space.check(f)
    return D.space.to_flat(f)


def _choose(scores, gamma, rng, allowed):
    s = np.where(allowed, scores, -np.inf)
    mx = s.max()
    if gamma == 1.0:
        return int(np.flatnonzero(s >= mx * (1.0 - TIE_RTOL))[0]), mx
    cand = np.flatnonzero(s >= gamma * mx)
    return int(cand[rng.integers(cand.size)]), mx


def run_oga(D, f, n_max, gamma=1.0, seed=0):
    """Orthogonal (``gamma = 1``) or weak orthogonal greedy algorithm.

    The approximant after step ``n`` is the orthogonal projection of ``f`` on
    the span of the selected atoms, maintained through an incrementally
    extended orthonormal basis. An atom whose component outside the current
    span is numerically zero is skipped (and counted in ``skipped``).
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    A = D.flat
    y = _check_target(D, f)
    k, dim = A.shape
    if n_max < 0 or n_max > min(dim, k):
        raise ValueError(f"n_max must be in [0, {min(dim, k)}], got {n_max}")
    rng = np.random.default_rng(seed)
    anorm = np.linalg.norm(A, axis=1)
    fnorm = float(np.linalg.norm(y))
    Q = np.zeros((0, dim))
    r = y.copy()
    selected, res, ips, pn, slack = [], [fnorm], [], [], []
    skipped = 0
    stop = None
    tr = OgaTrace(selected, res, np.zeros(0), ips, "OGA" if gamma == 1.0 else "WEAK_OGA", gamma, seed)
    for _ in range(n_max):
        scores = np.abs(A @ r)
        if scores.max() <= TOL_RANK * max(fnorm, 1e-300) * anorm.max():
            stop = "residual orthogonal to dictionary"
            break
        allowed = np.ones(k, dtype=bool)
        while True:
            if not allowed.any() or scores[allowed].max() <= 0.0:
                tr.skipped = skipped
                tr.stop_cause = "rank exhausted"
                raise RankExhausted("no admissible atom extends the span", tr)
            j, _ = _choose(scores, gamma, rng, allowed)
            g = A[j]
            gt = g - Q.T @ (Q @ g)
            gt -= Q.T @ (Q @ gt)
            ng = float(np.linalg.norm(gt))
            if ng > TOL_RANK * anorm[j]:
                break
            allowed[j] = False
            skipped += 1
        r2_prev = float(r @ r)
        bound = r2_prev - float(r @ gt) ** 2 / ng ** 2
        q = gt / ng
        Q = np.vstack([Q, q])
        r = y - Q.T @ (Q @ y)
        r -= Q.T @ (Q @ r)
        selected.append(j)
        ips.append(float(scores[j]))
        pn.append(ng)
        res.append(float(np.linalg.norm(r)))
        slack.append(bound - res[-1] ** 2)
    if stop is None and len(selected) < n_max:
        stop = "completed"
    coef = np.zeros(0)
    if selected:
        coef = np.linalg.lstsq(A[selected].T, y - r, rcond=None)[0]
    tr.coefficients = coef
    tr.stop_cause = stop or "n_max reached"
    tr.skipped = skipped
    tr.proj_norms = pn
    tr.recursion_slack = slack
    return tr


def run_pga(D, f, n_max):
    """Pure greedy: ``f_n = f_{n-1} + <r, g> g / ||g||^2`` (atoms may repeat)."""
    A = D.flat
    y = _check_target(D, f)
    a2 = np.einsum("ij,ij->i", A, A)
    r = y.copy()
    coef = np.zeros(A.shape[0])
    selected, res, ips = [], [float(np.linalg.norm(y))], []
    stop = "n_max reached"
    for _ in range(n_max):
        ip = A @ r
        sc = np.abs(ip) / np.sqrt(a2)
        if sc.max() <= TOL_RANK * max(res[0], 1e-300):
            stop = "residual orthogonal to dictionary"
            break
        j = int(np.flatnonzero(sc >= sc.max() * (1.0 - TIE_RTOL))[0])
        step = ip[j] / a2[j]
        coef[j] += step
        r = r - step * A[j]
        selected.append(j)
        ips.append(float(abs(ip[j])))
        res.append(float(np.linalg.norm(r)))
    return OgaTrace(selected, res, coef, ips, "PGA", stop_cause=stop)


def run_rga(D, f, n_max):
    """Relaxed greedy: ``f_n = alpha f_{n-1} + beta g`` minimised jointly.

    For every atom the 2x2 normal equations in ``(alpha, beta)`` are solved
    exactly; the atom giving the smallest residual wins.
    """
    A = D.flat
    y = _check_target(D, f)
    a2 = np.einsum("ij,ij->i", A, A)
    ay = A @ y
    yy = float(y @ y)
    fn = np.zeros_like(y)
    coef = np.zeros(A.shape[0])
    selected, res, ips = [], [math.sqrt(yy)], []
    stop = "n_max reached"
    for _ in range(n_max):
        ff = float(fn @ fn)
        fy = float(fn @ y)
        af = A @ fn
        # with f_{n-1} = 0 or g parallel to f_{n-1} only beta is determined
        r2_beta = yy - ay ** 2 / a2
        det = ff * a2 - af ** 2
        good = det > 1e-14 * ff * a2
        safe = np.where(good, det, 1.0)
        alpha = np.where(good, (a2 * fy - af * ay) / safe, 0.0)
        beta = np.where(good, (ff * ay - af * fy) / safe, ay / a2)
        r2 = np.where(good, yy - (alpha * fy + beta * ay), r2_beta)
        j = int(np.flatnonzero(r2 <= r2.min() + TIE_RTOL * yy)[0])
        if r2[j] >= res[-1] ** 2 - 1e-15 * yy:
            stop = "no atom decreases the residual"
            break
        a_j = float(alpha[j]) if good[j] else 0.0
        b_j = float(beta[j])
        ips.append(float(abs(A[j] @ (y - fn))))
        fn = a_j * fn + b_j * A[j]
        coef *= a_j
        coef[j] += b_j
        selected.append(j)
        res.append(float(np.linalg.norm(y - fn)))
    return OgaTrace(selected, res, coef, ips, "RGA", stop_cause=stop)


@dataclass(frozen=True)
class VariationCertificate:
    """``value = min sum |c_i|`` over exact representations ``f = sum c_i g_i``."""

    value: float
    coefficients: np.ndarray | None
    residual: float = 0.0

    @property
    def finite(self):
        return math.isfinite(self.value)

    def support(self):
        if self.coefficients is None:
            return {}
        return {int(i): float(c) for i, c in enumerate(self.coefficients) if c != 0.0}


def variation_norm(D, f, budget=200_000):
    """Exact variation norm by a linear program (split ``c = c+ - c-``).

    Returns ``inf`` with no witness when ``f`` is outside the span.
    """
    A = D.flat
    y = _check_target(D, f)
    k = A.shape[0]
    fnorm = float(np.linalg.norm(y))
    if fnorm == 0.0:
        return VariationCertificate(0.0, np.zeros(k))
    tol = TOL_LP * fnorm
    M = np.hstack([A.T, -A.T])
    res = linprog_bland(np.ones(2 * k), M, y, feas_tol=tol, budget=budget)
    if res.status == "infeasible":
        return VariationCertificate(math.inf, None, res.infeasibility)
    if res.status != "optimal":
        raise SolverFailure(f"variation-norm LP ended with status {res.status}")
    c = res.x[:k] - res.x[k:]
    err = float(np.linalg.norm(A.T @ c - y))
    if err > tol:
        # feasibility to rounding only: f sits on the edge of the span
        if err > 1e3 * tol:
            return VariationCertificate(math.inf, None, err)
        raise SolverFailure(f"LP witness misses f by {err:.3e}")
    return VariationCertificate(float(np.abs(c).sum()), c, err)


def best_n_term(D, f, n, budget=SUBSET_BUDGET, hints=()):
    """Exact best ``n``-term error by enumerating all ``n``-subsets.

    ``hints`` are extra subsets (e.g. an OGA selection) evaluated directly by
    least squares; they can only lower the result towards the true minimum.
    Returns ``(error, subset)``.
    """
    A = D.flat
    y = _check_target(D, f)
    k = A.shape[0]
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return float(np.linalg.norm(y)), np.zeros(0, dtype=np.intp)
    n = min(n, k)
    if math.comb(k, n) > budget:
        raise BudgetExceeded(f"C({k},{n}) subsets exceed budget {budget}")
    G = np.ascontiguousarray(A @ A.T)
    b = np.ascontiguousarray(A @ y)
    yy = float(y @ y)
    r2, idx, _ = kernels.best_subset(G, b, yy, n, 1e-12)

    def lsq(ix):
        ix = np.asarray(ix, dtype=np.intp)
        c = np.linalg.lstsq(A[ix].T, y, rcond=None)[0]
        return float(np.linalg.norm(y - A[ix].T @ c))

    best, best_ix = lsq(idx), np.asarray(idx)
    if r2 <= NEAR_EXACT * yy:
        # the Gram residual cancels to rounding level near an exact fit; rank directly
        for ix in itertools.combinations(range(k), n):
            e = lsq(ix)
            if e < best:
                best, best_ix = e, np.asarray(ix, dtype=np.intp)
    for h in hints:
        h = np.asarray(h, dtype=np.intp)[:n]
        if h.size and h.size <= n:
            e = lsq(h)
            if e < best:
                best, best_ix = e, h
    return best, best_ix


def recurrence_bound(a0, bs):
    """``1 / (b_0 + ... + b_n)`` with ``b_0 = 1 / a_0``, for ``n = 0..len(bs)``."""
    if not a0 > 0:
        raise ValueError("a0 must be positive")
    b = np.concatenate([[1.0 / a0], np.asarray(bs, dtype=float)])
    if np.any(b < 0):
        raise ValueError("bs must be nonnegative")
    return list(1.0 / np.cumsum(b))


def check_recurrence(a_seq, bs, rtol=1e-12):
    """Check ``a_n <= a_{n-1}(1 - b_n a_{n-1})`` and the resulting bound.

    Returns a dict with the first violating index of each (or ``None``).
    """
    a = np.asarray(a_seq, dtype=float)
    b = np.asarray(bs, dtype=float)
    if b.size != a.size - 1:
        raise ValueError("need len(bs) == len(a_seq) - 1")
    rec = a[1:] <= a[:-1] * (1.0 - b * a[:-1]) + rtol * a[:-1]
    bound = np.asarray(recurrence_bound(a[0], b))
    ok = a <= bound * (1.0 + rtol)
    first = lambda m: None if m.all() else int(np.flatnonzero(~m)[0])  # noqa: E731
    rec_bad = first(rec)
    return {
        "recurrence_violation": None if rec_bad is None else rec_bad + 1,
        "bound_violation": first(ok),
        "bound": bound.tolist(),
        "passed": rec_bad is None and ok.all(),
    }


# -- K-functional --------------------------------------------------------------


def _lasso_cd(A, y, lam, c, sweeps=2000, tol=1e-15):
    """Coordinate descent for ``0.5||y - A^T c||^2 + lam ||c||_1``."""
    a2 = np.einsum("ij,ij->i", A, A)
    r = y - A.T @ c
    for _ in range(sweeps):
        delta = 0.0
        for i in range(A.shape[0]):
            old = c[i]
            rho = A[i] @ r + a2[i] * old
            new = math.copysign(max(abs(rho) - lam, 0.0), rho) / a2[i]
            if new != old:
                r -= (new - old) * A[i]
                c[i] = new
                delta = max(delta, abs(new - old) * math.sqrt(a2[i]))
        if delta <= tol * max(np.linalg.norm(y), 1e-300):
            break
    return c


def _kfun_dual(A, y, t, r):
    """Feasible dual value ``<y, z>`` with ``||z|| <= 1``, ``||A z||_inf <= t``."""
    best = 0.0
    for v in (r, y):
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            continue
        z = v / nv
        s = float(np.abs(A @ z).max())
        if s > t:
            z = z * (t / s)
        best = max(best, float(y @ z))
    return best


@dataclass(frozen=True)
class KFunctional:
    t: float
    value: float  # upper estimate
    lower: float  # dual certificate
    coefficients: np.ndarray

    @property
    def gap(self):
        return self.value - self.lower


def k_functional(D, f, t, max_outer=500):
    """``K(t, f) = inf_h ||f - h|| + t ||h||_{L1(D)}`` over the finite span.

    Alternates ``sigma = ||r||`` with a lasso solve at ``lam = t sigma``
    (jointly convex in ``(c, sigma)``); the candidates ``h = 0`` and the
    minimal-l1 exact representation are also tried. A dual feasible point
    gives the lower value, so ``gap`` bounds the optimisation error.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    A = D.flat
    y = _check_target(D, f)
    yn = float(np.linalg.norm(y))
    obj = lambda c: float(np.linalg.norm(y - A.T @ c) + t * np.abs(c).sum())  # noqa: E731
    best_c = np.zeros(A.shape[0])
    best = yn
    vn = variation_norm(D, f)
    if vn.finite and t * vn.value < best:
        best, best_c = t * vn.value, vn.coefficients.copy()
    c = best_c.copy()
    sigma = max(float(np.linalg.norm(y - A.T @ c)), 1e-3 * yn)
    lower = 0.0
    for _ in range(max_outer):
        c = _lasso_cd(A, y, t * sigma, c)
        r = y - A.T @ c
        val = obj(c)
        if val < best:
            best, best_c = val, c.copy()
        lower = max(lower, _kfun_dual(A, y, t, r))
        new_sigma = float(np.linalg.norm(r))
        if best - lower <= TOL_OPT * max(yn, 1e-300) or new_sigma == 0.0:
            break
        if abs(new_sigma - sigma) <= 1e-15 * max(sigma, 1e-300):
            break
        sigma = new_sigma
    if best - lower > 1e-6 * max(yn, 1e-300):
        raise SolverFailure(f"K-functional gap {best - lower:.3e} not closed")
    return KFunctional(float(t), best, min(lower, best), best_c)


def k_functional_profile(D, f, ts, theta):
    """Rows ``(t, K(t, f), t^{-theta} K(t, f), gap)`` on a t-grid."""
    out = []
    for t in ts:
        k = k_functional(D, f, t)
        out.append((float(t), k.value, float(t) ** (-theta) * k.value, k.gap))
    return out


# -- dictionaries --------------------------------------------------------------


def relu_dictionary(k=1, grid_n=200, n_bias=100):
    """Discretised ``max(w x + b, 0)^k`` on ``[0, 1]`` with ``w = +-1``.

    The space is ``L2`` with trapezoid-free midpoint weights ``1/grid_n``;
    atoms are normalised and zero atoms dropped. Returns ``(D, x)``.
    """
    x = (np.arange(grid_n) + 0.5) / grid_n
    sp = AmbientSpace.euclidean(grid_n, np.full(grid_n, 1.0 / grid_n))
    b = np.linspace(-1.0, 1.0, n_bias)
    rows = []
    for w in (1.0, -1.0):
        for bb in b:
            g = np.maximum(w * x + bb, 0.0) ** k
            if np.any(g > 0):
                rows.append(g)
    A = np.array(rows)
    A = A / sp.norms(A)[:, None]
    # duplicates (e.g. shifts that saturate the grid) carry no information
    _, keep = np.unique(np.round(A, 14), axis=0, return_index=True)
    return Dictionary(A[np.sort(keep)], sp, True), x


def random_dictionary(rng, dim, size):
    """Gaussian atoms normalised to unit Euclidean norm."""
    return Dictionary.from_atoms(rng.standard_normal((size, dim)))


def random_hull_point(rng, D, terms=None):
    """A point ``sum c_i g_i`` with ``sum |c_i| <= 1``."""
    k = len(D)
    t = k if terms is None else min(terms, k)
    idx = rng.choice(k, size=t, replace=False)
    c = np.zeros(k)
    c[idx] = rng.dirichlet(np.ones(t)) * rng.choice([-1.0, 1.0], size=t)
    return c @ D.atoms, c
