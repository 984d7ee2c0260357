"""Strong and weak greedy selection over a finite compact set.

At step ``n`` the greedy algorithm picks the point of ``K`` farthest from
``X_{n-1} = span{f_1, ..., f_{n-1}}``; the weak variant accepts any point
whose distance is at least ``gamma`` times that maximum.
"""
import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSet, DimensionMismatch, EmptySet, RankDeficient
from .linalg_core import AmbientSpace, OrthoBasis, dist_lp, extend_basis

TIE_RTOL = 1e-12
STOP_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class PointCloud:
    """A finite set ``K`` (rows of ``points``) in ``space``."""

    points: np.ndarray
    space: AmbientSpace
    labels: list | None = None

    def __post_init__(self):
        P = np.array(self.points, dtype=float, ndmin=2)
        if P.size == 0:
            raise EmptySet("point cloud has no points")
        if P.shape[1] != self.space.dim:
            raise DimensionMismatch(f"points of dimension {P.shape[1]} in {self.space.describe()}")
        if not np.all(np.isfinite(P)):
            raise ValueError("point cloud has non-finite entries")
        P.setflags(write=False)
        object.__setattr__(self, "points", P)
        if self.labels is not None and len(self.labels) != P.shape[0]:
            raise ValueError("one label per point required")

    @classmethod
    def euclidean(cls, points, labels=None):
        P = np.array(points, dtype=float, ndmin=2)
        return cls(P, AmbientSpace.euclidean(P.shape[1]), labels)

    def __len__(self):
        return self.points.shape[0]

    @property
    def m(self):
        return self.points.shape[0]

    def norms(self):
        return self.space.norms(self.points)


@dataclass(eq=False)
class GreedyTrace:
    selected: list
    dists: list
    sigmas: list
    gamma: float
    seed: int | None = None
    n_requested: int = 0
    stop_step: int | None = None
    basis: object = field(default=None, repr=False)

    def check_invariants(self, atol=1e-12):
        """Return a list of violated trace invariants (empty when all hold)."""
        bad = []
        s = np.asarray(self.sigmas)
        scale = max(s[0], 1e-300) if s.size else 1.0
        if np.any(np.diff(s) > atol * scale):
            bad.append("sigmas not non-increasing")
        for k, d in enumerate(self.dists):
            if d < self.gamma * s[k] - atol * scale:
                bad.append(f"step {k + 1}: dist {d} < gamma * sigma {s[k]}")
            if self.gamma == 1.0 and abs(d - s[k]) > atol * scale:
                bad.append(f"step {k + 1}: argmax dist {d} != sigma {s[k]}")
        return bad

    # serialisation --------------------------------------------------------

    def to_dict(self):
        return {
            "selected": [int(i) for i in self.selected],
            "dists": [float(d) for d in self.dists],
            "sigmas": [float(s) for s in self.sigmas],
            "gamma": float(self.gamma),
            "seed": self.seed,
            "n_requested": int(self.n_requested),
            "stop_step": self.stop_step,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "selected_index", "dist", "sigma"])
        w.writerow([0, "", "", repr(float(self.sigmas[0]))])
        for k, (i, d) in enumerate(zip(self.selected, self.dists), start=1):
            w.writerow([k, int(i), repr(float(d)), repr(float(self.sigmas[k]))])
        return buf.getvalue()


def _pick(d, sigma, gamma, rng):
    if gamma == 1.0:
        cand = np.flatnonzero(d >= sigma * (1.0 - TIE_RTOL))
        return int(cand[0])
    cand = np.flatnonzero(d >= gamma * sigma)
    return int(cand[rng.integers(cand.size)])


def _flat_residuals(Y, Q):
    if Q.shape[0] == 0:
        return Y.copy()
    R = Y - (Y @ Q.T) @ Q
    return R - (R @ Q.T) @ Q


def run_greedy(K, n_max, gamma=1.0, seed=0):
    """Greedy (``gamma = 1``) or weak greedy selection of ``n_max`` points.

    For ``gamma = 1`` each step takes the argmax of the distance to the
    current span, lowest index first among ties. For ``gamma < 1`` a point is
    drawn uniformly (seeded) among those within the ``gamma`` threshold.
    Stops early once the maximal distance drops to ``1e-12 * sigma_0``;
    ``stop_step`` records where.
    """
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma}")
    m = K.m
    if m == 0:
        raise EmptySet("empty point cloud")
    if n_max < 1 or n_max > m:
        raise ValueError(f"n_max must be in [1, {m}], got {n_max}")
    sp = K.space
    norms = K.norms()
    sigma0 = float(norms.max())
    if sigma0 == 0.0:
        raise DegenerateSet("all points are zero")
    rng = np.random.default_rng(seed)

    selected, dists, sigmas = [], [], [sigma0]
    d = norms.copy()
    stop = None
    if sp.is_euclidean:
        R = np.array(sp.to_flat(K.points), dtype=float)
        basis = OrthoBasis.empty(sp)
    else:
        raw = []
    for step in range(1, n_max + 1):
        sigma = sigmas[-1]
        if sigma <= STOP_RTOL * sigma0:
            stop = step - 1
            break
        i = _pick(d, sigma, gamma, rng)
        selected.append(i)
        dists.append(float(d[i]))
        if sp.is_euclidean:
            try:
                basis = extend_basis(basis, K.points[i])
            except RankDeficient:
                stop = step - 1
                selected.pop()
                dists.pop()
                break
            q = basis.flat[-1]
            # rank-one downdate, applied twice to keep R orthogonal to q
            R -= np.outer(R @ q, q)
            R -= np.outer(R @ q, q)
            d = np.linalg.norm(R, axis=1)
            d[i] = 0.0
        else:
            raw.append(K.points[i])
            chosen = set(selected)
            d = np.array([0.0 if j in chosen else dist_lp(raw, K.points[j], sp) for j in range(m)])
        sigmas.append(float(d.max()))
    if stop is None and sigmas[-1] <= STOP_RTOL * sigma0 and len(selected) < n_max:
        stop = len(selected)
    return GreedyTrace(
        selected=selected,
        dists=dists,
        sigmas=sigmas,
        gamma=float(gamma),
        seed=seed,
        n_requested=int(n_max),
        stop_step=stop,
        basis=basis if sp.is_euclidean else np.array(raw).reshape(-1, sp.dim),
    )


def sigma_profile(K, basis_points):
    """``sigma_k`` of ``K`` against the nested spans of ``basis_points[:k]``.

    Returns ``k = 0, ..., len(basis_points)``.
    """
    sp = K.space
    B = np.asarray(basis_points, dtype=float).reshape(-1, sp.dim) if len(basis_points) else np.zeros((0, sp.dim))
    if B.shape[1] != sp.dim:
        raise DimensionMismatch("basis points and cloud live in different dimensions")
    out = [float(K.norms().max())]
    if sp.is_euclidean:
        Y = sp.to_flat(K.points)
        basis = OrthoBasis.empty(sp)
        for v in B:
            try:
                basis = extend_basis(basis, v)
            except RankDeficient:
                pass  # span unchanged
            out.append(float(np.linalg.norm(_flat_residuals(Y, basis.flat), axis=1).max()))
    else:
        for k in range(1, B.shape[0] + 1):
            out.append(max(dist_lp(B[:k], x, sp) for x in K.points))
    return out


def svd_sigma_profile(K, n_max):
    """Max distance from ``K`` to the leading ``n``-dim singular subspace.

    The subspace is optimal in mean square, not in max; combined with the
    greedy profile it gives a computable upper bound on the n-width.
    """
    sp = K.space
    sp.require_inner_product()
    Y = sp.to_flat(K.points)
    _, _, Vt = np.linalg.svd(Y, full_matrices=False)
    out = [float(np.linalg.norm(Y, axis=1).max())]
    for n in range(1, n_max + 1):
        Q = Vt[:min(n, Vt.shape[0])]
        out.append(float(np.linalg.norm(_flat_residuals(Y, Q), axis=1).max()))
    return out


def width_upper_bounds(K, trace):
    """Computable upper bounds on ``d_n(K)``: min of greedy and SVD profiles."""
    n = len(trace.sigmas) - 1
    svd = svd_sigma_profile(K, n)
    return [min(a, b) for a, b in zip(trace.sigmas, svd)]


def decaying_axes(x, p=2.0):
    """The set ``{x_i e_i}`` in ``l_p(R^len(x))``."""
    x = np.asarray(x, dtype=float)
    return PointCloud(np.diag(x), AmbientSpace(len(x), p))


def dyadic_sequence(length, alpha):
    """``x_j = 2^{-k alpha}`` for ``2^{k-1} <= j <= 2^k - 1`` (1-based ``j``)."""
    j = np.arange(1, length + 1)
    k = np.floor(np.log2(j)).astype(int) + 1
    # guard float log2 at exact powers of two
    k = np.where(2 ** (k - 1) > j, k - 1, k)
    k = np.where(2 ** k <= j, k + 1, k)
    return 2.0 ** (-k * float(alpha))


def gaussian_cloud(m, dim, rng, decay=None):
    """``m`` Gaussian points in ``R^dim``, optionally with decaying axis scales."""
    X = rng.standard_normal((m, dim))
    if decay is not None:
        X *= np.arange(1, dim + 1) ** (-float(decay))
    return PointCloud.euclidean(X)


__all__ = [
    "PointCloud",
    "GreedyTrace",
    "run_greedy",
    "sigma_profile",
    "svd_sigma_profile",
    "width_upper_bounds",
    "decaying_axes",
    "dyadic_sequence",
    "gaussian_cloud",
]
