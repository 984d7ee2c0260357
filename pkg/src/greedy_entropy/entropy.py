"""Certified brackets for entropy numbers.

``eps_n(K)`` is the smallest radius for which ``2**n`` balls cover ``K``.
Every upper value returned here comes with an explicit cover object whose
``center_for`` method produces, for any point of the set, a centre within the
reported radius. Lower values come from volume comparison or packings.
"""
import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

import numpy as np
from scipy.spatial.distance import cdist

from . import kernels
from .errors import DimensionMismatch
from .greedy_rbm import PointCloud, run_greedy
from .linalg_core import AmbientSpace, flat_norm

EXACT_BUDGET = 4096  # set partitions the exact path may enumerate
VERIFY_RTOL = 1e-12
SLOPE_TOL = 0.15
MAX_VOLUME_DIM = 256
HULL_SAMPLES = 64


class Method(str, Enum):
    VOLUME_LEMMA1 = "VOLUME_LEMMA1"
    PACKING = "PACKING"
    GREEDY_COVER = "GREEDY_COVER"
    EXACT_SMALL = "EXACT_SMALL"
    MAUREY_SPARSE = "MAUREY_SPARSE"
    BOX_GRID = "BOX_GRID"
    SPARSE_LATTICE = "SPARSE_LATTICE"
    ZERO_BALL = "ZERO_BALL"
    TRIVIAL = "TRIVIAL"


# -- closed-form constants ------------------------------------------------------


def log_ball_volume(d, p=2.0):
    """log of the volume of the unit l_p ball in ``R^d``."""
    if d == 0:
        return 0.0
    if p == 2.0:
        return 0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1.0)
    if math.isinf(p):
        return d * math.log(2.0)
    return d * math.log(2.0) + d * math.lgamma(1.0 + 1.0 / p) - math.lgamma(1.0 + d / p)


def stirling_factor(n):
    """``(n! V_n)^{1/n}`` with ``V_n`` the Euclidean unit-ball volume."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.exp((math.lgamma(n + 1.0) + log_ball_volume(n)) / n)


def delta_n_bound(space, n):
    """Bound on the distance of n-dim subspaces of ``space`` to ``l_2^n``.

    ``n^{|1/2 - 1/p|}`` for l_p spaces; ``space=None`` means a general
    Banach space and gives ``sqrt(n)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if space is None:
        return math.sqrt(n)
    p = space.p if isinstance(space, AmbientSpace) else float(space)
    inv = 0.0 if math.isinf(p) else 1.0 / p
    return float(n) ** abs(0.5 - inv)


def fit_loglog_slope(ns, values):
    """OLS slope of ``log(values)`` against ``log(ns)``."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    if x.size < 2 or not np.all(np.isfinite(y)):
        return float("nan")
    return float(np.polyfit(x, y, 1)[0])


def carl_rate_check(d_seq, eps_seq, alpha=None, ns=None, tol=SLOPE_TOL):
    """Compare decay rates of widths and entropy numbers on a log-log fit.

    Passes when the entropy sequence decays at least as fast as the width
    sequence, up to ``tol`` in slope. No constant is asserted. ``alpha``,
    when given, is recorded and compared to the width slope for reference.
    """
    d = np.asarray(d_seq, dtype=float)
    e = np.asarray(eps_seq, dtype=float)
    if d.shape != e.shape:
        raise ValueError("sequences must have the same length")
    if np.any(d <= 0) or np.any(e <= 0):
        raise ValueError("sequences must be positive")
    ns = np.arange(1, d.size + 1) if ns is None else np.asarray(ns, dtype=float)
    sd = fit_loglog_slope(ns, d)
    se = fit_loglog_slope(ns, e)
    return {
        "slope_widths": sd,
        "slope_entropy": se,
        "alpha": alpha,
        "tolerance": tol,
        "window": [float(ns[0]), float(ns[-1])],
        "passed": bool(se <= sd + tol),
    }


# -- covers -------------------------------------------------------------------


def _pdist(A, B, p):
    if p == 2.0:
        return cdist(A, B)
    if math.isinf(p):
        return cdist(A, B, "chebyshev")
    if p == 1.0:
        return cdist(A, B, "cityblock")
    return cdist(A, B, "minkowski", p=p)


class Cover:
    """Base for cover witnesses; subclasses work in flat coordinates."""

    space: AmbientSpace
    radius: float
    method: Method

    @property
    def log2_count(self):
        raise NotImplementedError

    def centers_for(self, Y):
        raise NotImplementedError

    def verify(self, points, rtol=VERIFY_RTOL):
        """Check every row of ``points`` lies within ``radius`` of its centre."""
        P = np.asarray(points, dtype=float).reshape(-1, self.space.dim)
        if P.shape[0] == 0:
            return True
        Y = self.space.to_flat(P)
        C = self.centers_for(Y)
        if C is None:
            return False
        d = flat_norm(Y - C, self.space.p, axis=1)
        scale = max(self.radius, float(flat_norm(Y, self.space.p, axis=1).max()), 1e-300)
        return bool(np.all(d <= self.radius + rtol * scale))


@dataclass(eq=False)
class PointCover(Cover):
    """Finitely many explicit centres (original coordinates)."""

    centers: np.ndarray
    radius: float
    space: AmbientSpace
    method: Method = Method.GREEDY_COVER

    @property
    def count(self):
        return int(self.centers.shape[0])

    @property
    def log2_count(self):
        return math.log2(max(self.count, 1))

    def centers_for(self, Y):
        C = self.space.to_flat(self.centers)
        j = np.argmin(_pdist(Y, C, self.space.p), axis=1)
        return C[j]


def union_cover(a, b):
    """Cover of ``A u B`` from covers of ``A`` and ``B`` (centres concatenated)."""
    if a.space != b.space:
        raise DimensionMismatch("covers live in different spaces")
    return PointCover(np.vstack([a.centers, b.centers]), max(a.radius, b.radius), a.space, a.method)


def minkowski_cover(a, b):
    """Cover of ``A + B`` with all pairwise centre sums; radii add."""
    if a.space != b.space:
        raise DimensionMismatch("covers live in different spaces")
    C = (a.centers[:, None, :] + b.centers[None, :, :]).reshape(-1, a.space.dim)
    return PointCover(C, a.radius + b.radius, a.space, a.method)


@dataclass(eq=False)
class BoxCover(Cover):
    """Uniform grid on a symmetric box ``|U y| <= h`` (flat coordinates).

    Axis ``j`` is cut into ``L[j]`` equal cells; the cell radius is the
    largest norm of a half-diagonal, plus ``resid`` for the part of the set
    outside ``span(U)``.
    """

    U: np.ndarray
    h: np.ndarray
    L: np.ndarray
    radius: float
    space: AmbientSpace
    resid: float = 0.0
    method: Method = Method.BOX_GRID

    @property
    def log2_count(self):
        return float(np.sum(np.log2(self.L)))

    def centers_for(self, Y):
        T = Y @ self.U.T
        h = self.h
        w = np.where(h > 0, 2.0 * h / self.L, 1.0)
        idx = np.clip(np.floor((T + h) / w), 0, self.L - 1)
        c = np.where(h > 0, -h + (idx + 0.5) * w, 0.0)
        return c @ self.U


def _box_radius(U, delta, p):
    if p == 2.0 and np.allclose(U @ U.T, np.eye(U.shape[0]), atol=1e-12):
        return float(np.linalg.norm(delta))
    active = np.flatnonzero(delta > 0)
    if active.size == 0:
        return 0.0
    if U.shape[0] == U.shape[1] and np.array_equal(U, np.eye(U.shape[0])):
        return float(flat_norm(delta, p))
    V = delta[active, None] * U[active]
    if active.size <= 12:
        signs = np.array(np.meshgrid(*([[-1.0, 1.0]] * active.size))).reshape(active.size, -1).T
        return float(flat_norm(signs @ V, p, axis=1).max())
    return float(flat_norm(V, p, axis=1).sum())


def box_cover(G, space, n, basis="coordinate"):
    """Grid cover of ``co(+-G)`` with ``2**n`` cells (rows of ``G`` flat)."""
    p = space.p
    if basis == "coordinate":
        U = np.eye(space.dim)
        resid = 0.0
    else:
        _, s, Vt = np.linalg.svd(G, full_matrices=False)
        r = int(np.sum(s > 1e-13 * max(s[0], 1e-300)))
        U = Vt[:max(r, 1)]
        E = G - (G @ U.T) @ U
        resid = float(flat_norm(E, p, axis=1).max())
    h = np.abs(G @ U.T).max(axis=0)
    un = flat_norm(U, p, axis=1)
    L = np.ones(U.shape[0])
    for _ in range(int(n)):
        j = int(np.argmax(h / L * un))
        if h[j] == 0.0:
            break
        L[j] *= 2.0
    rad = _box_radius(U, h / L, p) + resid
    return BoxCover(U, h, L, rad, space, resid)


@dataclass(eq=False)
class MaureyCover(Cover):
    """Averages of ``s`` atoms from ``+-G u {0}`` (Euclidean only).

    For ``y`` in the hull the centre is built by derandomised sampling: each
    step adds the atom minimising the running error sum, which keeps
    ``||y - mean|| <= R / sqrt(s)``.
    """

    G: np.ndarray
    s: int
    radius: float
    space: AmbientSpace
    method: Method = Method.MAUREY_SPARSE

    @property
    def log2_count(self):
        m = self.G.shape[0]
        return math.log2(math.comb(2 * m + self.s, self.s))

    def centers_for(self, Y):
        A = np.vstack([self.G, -self.G, np.zeros((1, self.G.shape[1]))])
        a2 = np.einsum("ij,ij->i", A, A)
        out = np.empty_like(Y)
        for r, y in enumerate(Y):
            S = np.zeros_like(y)
            tot = np.zeros_like(y)
            for _ in range(self.s):
                v = S + y
                j = int(np.argmin(a2 - 2.0 * (A @ v)))
                S = v - A[j]
                tot += A[j]
            out[r] = tot / self.s
        return out


def maurey_sparsity(m, n):
    """Largest ``s`` with ``C(2m + s, s) <= 2**n`` (0 when none fits)."""
    s = 0
    while math.comb(2 * m + s + 1, s + 1) <= 2 ** n:
        s += 1
    return s


def maurey_cover(G, space, n):
    space.require_inner_product()
    s = maurey_sparsity(G.shape[0], n)
    if s == 0:
        return None
    R = float(np.linalg.norm(G, axis=1).max())
    return MaureyCover(G, s, R / math.sqrt(s), space)


def lattice_size(M, S):
    """Number of integer points ``z`` in ``Z^M`` with ``||z||_1 <= S``."""
    return sum(2 ** j * math.comb(M, j) * math.comb(S, j) for j in range(min(M, S) + 1))


@dataclass(eq=False)
class LatticeCover(Cover):
    """Quantised coefficient cover of a weighted cross-polytope.

    The set is ``{w * c : ||c||_1 <= 1}``. Coordinates are grouped in blocks
    of equal weight; block ``k`` rounds ``c`` to ``z / s_k`` (truncation or
    nearest), and the centre set is every ``z`` with ``||z||_1 <= S_k``.
    """

    w: np.ndarray
    blocks: list  # (indices, weight, mode, s, S)
    radius: float
    space: AmbientSpace
    method: Method = Method.SPARSE_LATTICE

    @property
    def log2_count(self):
        return float(sum(math.log2(lattice_size(len(ix), S)) for ix, _, _, s, S in self.blocks if s > 0))

    def centers_for(self, Y):
        out = np.zeros_like(Y)
        safe = np.where(self.w > 0, self.w, 1.0)
        if np.any(np.abs(Y[:, self.w == 0]) > 0):
            return None
        Cf = Y / safe
        for ix, x, mode, s, S in self.blocks:
            if s == 0:
                continue
            c = Cf[:, ix] * s
            z = np.trunc(c) if mode == "trunc" else np.rint(c)
            if np.any(np.abs(z).sum(axis=1) > S):
                return None
            out[:, ix] = x * z / s
        return out


def _s_grid(s_max):
    s, out = 1, []
    while s <= s_max:
        out.append(s)
        s = s + 1 if s < 16 else int(math.ceil(s * 1.25))
    return out


def _lattice_options(M, p, n, s_max=4096):
    """Per-block quantiser options ``(log2 count, slope, cap, mode, s, S)``.

    ``slope`` and ``cap`` describe a concave majorant of the block error:
    ``||e||_p^p <= min(slope * lam, cap)`` for block l1 mass ``lam`` (for
    ``p = inf`` both hold the bound on ``max |e|``). Options costing more
    than ``n`` bits are dropped.
    """
    opts = [(0.0, 1.0, 1.0, "zero", 0, 0)]
    for mode in ("trunc", "round"):
        for s in _s_grid(s_max):
            q = 1.0 / s if mode == "trunc" else 0.5 / s
            S = s if mode == "trunc" else int(math.floor(s + min(M, 2 * s) / 2.0))
            bits = math.log2(lattice_size(M, S))
            if bits > n:
                break
            if math.isinf(p):
                opts.append((bits, q, q, mode, s, S))
            else:
                opts.append((bits, q ** (p - 1.0), min(M * q ** p, 1.0), mode, s, S))
    return opts


def _knapsack_value(slopes, caps):
    """max of sum min(slope_k lam_k, cap_k) over lam >= 0, sum lam <= 1."""
    order = np.argsort(-slopes, kind="stable")
    left, val = 1.0, 0.0
    for k in order:
        if left <= 0 or slopes[k] <= 0:
            break
        take = min(left, caps[k] / slopes[k])
        val += slopes[k] * take
        left -= take
    return val


def _allocate(tables, n, p):
    """Pick one option per block with total bits <= n and small error.

    For ``p < inf`` the knapsack value is bounded for any ``mu >= 0`` by
    ``mu + sum_k max(0, cap_k (1 - mu / slope_k))``; that bound is separable,
    so for each ``mu`` on a grid a Lagrange multiplier on bits is bisected.
    """
    def evaluate(choice):
        sl = np.array([t[0][i] for t, i in zip(tables, choice)])
        cp = np.array([t[1][i] for t, i in zip(tables, choice)])
        if math.isinf(p):
            return float(np.max(sl, initial=0.0))
        return _knapsack_value(sl, cp)

    def solve(cost):
        # cost: list of per-block arrays; returns the min-bits choice for nu
        lo, hi = 0.0, 1.0
        while True:
            ch = [int(np.argmin(c + hi * t[2])) for c, t in zip(cost, tables)]
            if sum(t[2][i] for t, i in zip(tables, ch)) <= n + 1e-9:
                break
            hi *= 4.0
        best = ch
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            ch = [int(np.argmin(c + mid * t[2])) for c, t in zip(cost, tables)]
            if sum(t[2][i] for t, i in zip(tables, ch)) <= n + 1e-9:
                hi, best = mid, ch
            else:
                lo = mid
        return best

    top = max(float(t[0].max()) for t in tables)
    best, best_val = [0] * len(tables), evaluate([0] * len(tables))
    if math.isinf(p):
        grid = [None]
    else:
        tiny = min(float(t[0][t[0] > 0].min()) for t in tables)
        grid = np.geomspace(max(tiny, top * 1e-30), top, 96)
    for mu in grid:
        if mu is None:
            cost = [t[0] for t in tables]
        else:
            cost = [np.maximum(0.0, t[1] * (1.0 - mu / t[0])) for t in tables]
        ch = solve(cost)
        v = evaluate(ch)
        if v < best_val:
            best, best_val = ch, v
    return best, best_val


def lattice_cover(G, space, n):
    """Sparse lattice cover for generators that are multiples of unit vectors.

    Returns ``None`` when some generator has more than one nonzero entry.
    """
    nz = np.count_nonzero(G, axis=1)
    if np.any(nz > 1):
        return None
    w = np.zeros(space.dim)
    for g in G[nz == 1]:
        j = int(np.flatnonzero(g)[0])
        w[j] = max(w[j], abs(g[j]))
    vals = np.unique(w[w > 0])[::-1]
    groups = [np.flatnonzero(w == v) for v in vals]
    p = space.p
    opts = [_lattice_options(len(ix), p, n) for ix in groups]
    tables = []
    for v, o in zip(vals, opts):
        xp = v if math.isinf(p) else v ** p
        tables.append((xp * np.array([t[1] for t in o]), xp * np.array([t[2] for t in o]),
                       np.array([t[0] for t in o])))
    choice, val = _allocate(tables, n, p)
    best = [o[i] for o, i in zip(opts, choice)]
    # exact integer check of the centre count
    while math.prod(lattice_size(len(ix), c[5]) for ix, c in zip(groups, best)) > 2 ** n:
        k = max(range(len(best)), key=lambda i: best[i][0])
        best[k] = opts[k][0]
    sl = np.array([t[0][o.index(c)] for t, o, c in zip(tables, opts, best)])
    cp = np.array([t[1][o.index(c)] for t, o, c in zip(tables, opts, best)])
    rad = float(np.max(sl, initial=0.0)) if math.isinf(p) else _knapsack_value(sl, cp) ** (1.0 / p)
    blocks = [(ix, float(v), c[3], c[4], c[5]) for ix, v, c in zip(groups, vals, best)]
    return LatticeCover(w, blocks, rad, space)


# -- estimates ------------------------------------------------------------------


@dataclass(eq=False)
class EntropyEstimate:
    n: int
    lower: float
    upper: float
    method_lower: Method
    method_upper: Method
    witness: Cover | None = field(default=None, repr=False)
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lower < 0 or self.upper < 0:
            raise ValueError("entropy bracket must be nonnegative")
        if self.lower > self.upper:
            if self.lower - self.upper <= 1e-12 * max(self.upper, 1e-300):
                self.lower = self.upper
            else:
                raise ValueError(f"inverted bracket: lower {self.lower} > upper {self.upper}")

    def row(self):
        return [self.n, repr(float(self.lower)), repr(float(self.upper)),
                self.method_lower.value, self.method_upper.value]


def estimates_to_csv(estimates):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "lower", "upper", "method_lower", "method_upper"])
    for e in estimates:
        w.writerow(e.row())
    return buf.getvalue()


def regularize(estimates):
    """Monotone brackets: running min of uppers, reverse running max of lowers."""
    up = np.minimum.accumulate([e.upper for e in estimates])
    lo = np.maximum.accumulate([e.lower for e in estimates][::-1])[::-1]
    return [float(x) for x in lo], [float(x) for x in up]


# -- finite sets --------------------------------------------------------------


def _partition_count(m, k):
    """Set partitions of ``m`` items into at most ``k`` blocks."""
    S = [[0] * (k + 1) for _ in range(m + 1)]
    S[0][0] = 1
    for i in range(1, m + 1):
        for j in range(1, min(i, k) + 1):
            S[i][j] = j * S[i - 1][j] + S[i - 1][j - 1]
    return sum(S[m][1:])


def _partitions(m, k):
    a = [0] * m

    def rec(i, used):
        if i == m:
            yield a
            return
        for b in range(min(used + 1, k)):
            a[i] = b
            yield from rec(i + 1, max(used, b + 1))

    if m:
        yield from rec(1, 1)


def exact_enclosing_ball(Y, p):
    """Minimum enclosing ball of a few points (``p`` in {2, inf})."""
    if Y.shape[0] == 1:
        return Y[0].copy(), 0.0
    if math.isinf(p):
        lo, hi = Y.min(axis=0), Y.max(axis=0)
        return 0.5 * (lo + hi), float(0.5 * (hi - lo).max())
    best_c, best_r = None, math.inf
    m = Y.shape[0]
    for k in range(2, min(m, Y.shape[1] + 1) + 1):
        for sub in combinations(range(m), k):
            S = Y[list(sub)]
            D = S[1:] - S[0]
            # circumcentre in the affine hull: c = S0 + D^T t with D D^T t = |D|^2 / 2
            M = D @ D.T
            rhs = 0.5 * np.einsum("ij,ij->i", D, D)
            try:
                t = np.linalg.solve(M, rhs)
            except np.linalg.LinAlgError:
                continue
            c = S[0] + D.T @ t
            r = float(np.linalg.norm(S[0] - c))
            if r < best_r and np.all(np.linalg.norm(Y - c, axis=1) <= r * (1 + 1e-12) + 1e-15):
                best_c, best_r = c, r
    return best_c, best_r


def _exact_cover(Y, k, p):
    m = Y.shape[0]
    cache = {}

    def ball(mask):
        if mask not in cache:
            idx = [i for i in range(m) if mask >> i & 1]
            cache[mask] = exact_enclosing_ball(Y[idx], p)
        return cache[mask]

    best_r, best_c = math.inf, None
    for a in _partitions(m, k):
        masks = {}
        for i, b in enumerate(a):
            masks[b] = masks.get(b, 0) | (1 << i)
        balls = [ball(mk) for mk in masks.values()]
        r = max(b[1] for b in balls)
        if r < best_r:
            best_r, best_c = r, np.array([b[0] for b in balls])
    return best_c, best_r


def _approx_center(Y, p, iters=200):
    """A good (not optimal) centre for a cluster."""
    if Y.shape[0] == 1:
        return Y[0].copy()
    if math.isinf(p):
        return 0.5 * (Y.min(axis=0) + Y.max(axis=0))
    if p == 2.0:
        c = Y.mean(axis=0)
        for t in range(1, iters + 1):
            far = Y[np.argmax(np.linalg.norm(Y - c, axis=1))]
            c = c + (far - c) / (t + 1)
        return c
    D = _pdist(Y, Y, p)
    return Y[int(np.argmin(D.max(axis=1)))].copy()


def _refine(Y, C, p, rounds=20):
    """Local improvement: re-centre the worst cluster, or swap in a member."""
    C = C.copy()
    for _ in range(rounds):
        D = _pdist(Y, C, p)
        a = np.argmin(D, axis=1)
        dmin = D[np.arange(Y.shape[0]), a]
        r = float(dmin.max())
        j = int(a[np.argmax(dmin)])
        members = Y[a == j]
        cands = [_approx_center(members, p)]
        Dm = _pdist(members, members, p)
        cands.append(members[int(np.argmin(Dm.max(axis=1)))])
        improved = False
        for c in cands:
            C2 = C.copy()
            C2[j] = c
            r2 = float(_pdist(Y, C2, p).min(axis=1).max())
            if r2 < r * (1 - 1e-12):
                C, improved = C2, True
                break
        if not improved:
            break
    return C


def entropy_pointset(K, n, candidates=()):
    """Bracket ``eps_n`` of a finite set.

    Small instances (few set partitions, p in {2, inf}) are solved exactly.
    Otherwise the upper value is a Gonzalez k-centre cover improved by local
    moves, and the lower value is half the separation of the ``2**n + 1``
    farthest-point packing. Extra ``candidates`` (cover witnesses) are used
    when they verify on ``K`` and have at most ``2**n`` centres.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    sp = K.space
    Y = np.ascontiguousarray(sp.to_flat(K.points))
    m = Y.shape[0]
    p = sp.p
    if m <= 2 ** n:
        return EntropyEstimate(n, 0.0, 0.0, Method.TRIVIAL, Method.TRIVIAL,
                               PointCover(np.array(K.points), 0.0, sp, Method.TRIVIAL))
    k = 2 ** n
    if (p == 2.0 or math.isinf(p)) and _partition_count(m, k) <= EXACT_BUDGET:
        C, r = _exact_cover(Y, k, p)
        cov = PointCover(sp.from_flat(C), r, sp, Method.EXACT_SMALL)
        return EntropyEstimate(n, r, r, Method.EXACT_SMALL, Method.EXACT_SMALL, cov)

    order, radii = kernels.farthest_point(Y, k, 0, p)
    order = np.asarray(order)
    rk = float(radii[k - 1])
    pack = order[: k + 1]
    if pack.size == k + 1 and (k + 1) ** 2 <= 4_000_000:
        Dp = _pdist(Y[pack], Y[pack], p)
        np.fill_diagonal(Dp, np.inf)
        lower = 0.5 * float(Dp.min())
    else:
        lower = 0.5 * rk
    C = _refine(Y, Y[order[:k]], p) if k <= 512 else Y[order[:k]]
    upper = float(_pdist(Y, C, p).min(axis=1).max())
    cov = PointCover(sp.from_flat(C), upper, sp, Method.GREEDY_COVER)
    for cand in candidates:
        if cand.log2_count <= n + 1e-12 and cand.radius < upper and cand.verify(K.points):
            cov, upper = cand, cand.radius
    return EntropyEstimate(n, min(lower, upper), upper, Method.PACKING, cov.method, cov)


# -- symmetric convex hulls -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConvexHullSet:
    """``co(K)``: all ``sum c_i g_i`` with ``sum |c_i| <= 1``, ``g_i`` in ``K``."""

    generators: PointCloud

    @property
    def space(self):
        return self.generators.space

    def sample(self, count, rng, max_terms=4):
        """Random hull points, their coefficient vectors, plus vertices and 0."""
        G = self.generators.points
        m = G.shape[0]
        out = [G, -G, np.zeros((1, G.shape[1]))]
        for _ in range(count):
            t = int(rng.integers(1, min(max_terms, m) + 1))
            idx = rng.choice(m, size=t, replace=False)
            c = rng.dirichlet(np.ones(t)) * rng.choice([-1.0, 1.0], size=t)
            c *= rng.uniform(0.5, 1.0)
            out.append((c @ G[idx])[None, :])
        return np.vstack(out)


def volume_lower_bound(vs, n=None, space=None):
    """Volume lower bound on ``eps_n(co(vs))`` in a Euclidean space.

    With ``d = len(vs)``, ``co(+-vs)`` contains a cross-polytope of volume
    ``2^d / d! * prod r_k`` (``r_k`` the Gram-Schmidt residual norms), and
    ``2^n`` balls of radius ``eps`` have volume at most ``2^n eps^d V_d``.
    ``n`` defaults to ``d``. Returns 0 if the vectors are dependent.
    """
    V = np.asarray(vs, dtype=float)
    if V.ndim == 1:
        V = V[None, :]
    d = V.shape[0]
    if d == 0:
        return 0.0
    sp = space if space is not None else AmbientSpace.euclidean(V.shape[1])
    sp.require_inner_product()
    Q, R = np.linalg.qr(sp.to_flat(V).T)
    res = np.abs(np.diag(R))
    return _volume_bound_from_logdet(float(np.sum(np.log(res))) if np.all(res > 0) else -math.inf,
                                     d, d if n is None else n, 2.0)


def _volume_bound_from_logdet(logdet, d, n, p):
    if not math.isfinite(logdet):
        return 0.0
    lv = d * math.log(2.0) - math.lgamma(d + 1.0) + logdet
    return math.exp((lv - n * math.log(2.0) - log_ball_volume(d, p)) / d)


def _hull_volume_lower(G, p, n, dmax):
    """Best volume bound over greedy-selected prefixes (flat generators)."""
    m, dim = G.shape
    nmax = min(m, dim, dmax)
    tr = run_greedy(PointCloud.euclidean(G), nmax, 1.0, 0)
    sel = tr.selected
    if p == 2.0:
        logs = np.log(np.maximum(np.asarray(tr.dists), 1e-300))
        best = 0.0
        for d in range(1, len(sel) + 1):
            best = max(best, _volume_bound_from_logdet(float(logs[:d].sum()), d, n, 2.0))
        return best
    # coordinate projections are 1-Lipschitz in every l_p
    from scipy.linalg import qr

    V = G[sel]
    _, _, piv = qr(V, pivoting=True, mode="economic")
    best = 0.0
    for d in range(1, len(sel) + 1):
        sgn, ld = np.linalg.slogdet(V[:d][:, piv[:d]])
        if sgn != 0:
            best = max(best, _volume_bound_from_logdet(float(ld), d, n, p))
    return best


def entropy_hull(H, n, seed=0, methods=None, verify=True):
    """Bracket ``eps_n(co(K))``.

    Lower: volume bound over greedy-selected generator prefixes, and half the
    separation of a farthest-point packing of ``+-K u {0}``.
    Upper: the best verified cover among a ball at 0, grid covers (coordinate
    and principal axes), the Maurey sparse-average cover (Euclidean) and the
    lattice cover (axis-aligned generators).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    sp = H.space
    p = sp.p
    G = sp.to_flat(H.generators.points)
    G = G[np.any(G != 0, axis=1)]
    if G.shape[0] == 0:
        z = PointCover(np.zeros((1, sp.dim)), 0.0, sp, Method.TRIVIAL)
        return EntropyEstimate(n, 0.0, 0.0, Method.TRIVIAL, Method.TRIVIAL, z)
    flags = {}
    allowed = set(methods) if methods is not None else None

    def want(mth):
        return allowed is None or mth in allowed

    # lower
    lows = [(0.0, Method.TRIVIAL)]
    if want(Method.VOLUME_LEMMA1):
        lows.append((_hull_volume_lower(G, p, n, min(MAX_VOLUME_DIM, 4 * n + 8)), Method.VOLUME_LEMMA1))
    if want(Method.PACKING):
        P = np.vstack([G, -G, np.zeros((1, sp.dim))])
        k = 2 ** n
        if P.shape[0] > k and k <= 4096:
            order, radii = kernels.farthest_point(np.ascontiguousarray(P), k, 0, p)
            lows.append((0.5 * float(radii[k - 1]), Method.PACKING))
    lower, mlow = max(lows, key=lambda t: t[0])

    # upper
    R = float(flat_norm(G, p, axis=1).max())
    cands = [PointCover(np.zeros((1, sp.dim)), R, sp, Method.ZERO_BALL)]
    if want(Method.BOX_GRID):
        cands.append(box_cover(G, sp, n, "coordinate"))
        if sp.dim > 1:
            cands.append(box_cover(G, sp, n, "principal"))
    if want(Method.MAUREY_SPARSE) and p == 2.0:
        mc = maurey_cover(G, sp, n)
        if mc is None:
            flags["maurey_budget"] = True
        else:
            cands.append(mc)
    if want(Method.SPARSE_LATTICE):
        lc = lattice_cover(G, sp, n)
        if lc is not None:
            cands.append(lc)
    cands.sort(key=lambda c: c.radius)
    pts = H.sample(HULL_SAMPLES, np.random.default_rng(seed)) if verify else None
    chosen = None
    for c in cands:
        if c.log2_count > n + 1e-9:
            continue
        if verify and not c.verify(pts):
            flags.setdefault("rejected", []).append(c.method.value)
            continue
        chosen = c
        break
    flags["verified"] = bool(verify)
    return EntropyEstimate(n, min(lower, chosen.radius), chosen.radius, mlow, chosen.method, chosen, flags)


def entropy_profile(obj, ns, **kw):
    """Estimates for each ``n`` in ``ns`` (point cloud or convex hull)."""
    f = entropy_hull if isinstance(obj, ConvexHullSet) else entropy_pointset
    return [f(obj, int(n), **kw) for n in ns]
