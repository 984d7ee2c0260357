"""Property-based checks of the module invariants."""
import math

import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st

from greedy_entropy import kernels
from greedy_entropy.entropy import ConvexHullSet, entropy_hull, entropy_pointset, stirling_factor, union_cover
from greedy_entropy.experiments import ExperimentConfig
from greedy_entropy.greedy_rbm import PointCloud, run_greedy, svd_sigma_profile
from greedy_entropy.linalg_core import AmbientSpace, OrthoBasis, dist_lp, extend_basis, project
from greedy_entropy.oga import (
    best_n_term,
    random_dictionary,
    random_hull_point,
    recurrence_bound,
    run_oga,
    run_pga,
    variation_norm,
)

seeds = st.integers(0, 2 ** 31 - 1)


def _cloud(seed, p=2.0, dmax=6, mmax=12):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, dmax + 1))
    m = int(rng.integers(1, mmax + 1))
    X = rng.standard_normal((m, dim)) * rng.uniform(0.1, 3.0)
    return PointCloud(X, AmbientSpace(dim, p))


@given(seeds, st.sampled_from([1.0, 0.7, 0.3]))
def test_greedy_trace_invariants(seed, gamma):
    K = _cloud(seed)
    tr = run_greedy(K, min(5, K.m), gamma, seed)
    assert tr.check_invariants(atol=1e-10) == []
    assert len(set(tr.selected)) == len(tr.selected)


@given(seeds)
def test_greedy_dominates_svd_width_bound_at_zero(seed):
    K = _cloud(seed)
    tr = run_greedy(K, min(4, K.m))
    svd = svd_sigma_profile(K, len(tr.sigmas) - 1)
    assert math.isclose(svd[0], tr.sigmas[0])


@given(seeds, st.integers(1, 6))
def test_volume_product_bound(seed, n):
    K = _cloud(seed)
    tr = run_greedy(K, min(n, K.m))
    assume(len(tr.dists) == n)
    e = entropy_hull(ConvexHullSet(K), n)
    prod = math.exp(np.mean(np.log(tr.dists)))
    assert prod <= stirling_factor(n) * e.upper * (1 + 1e-9)
    assert tr.sigmas[n] <= stirling_factor(n) * e.upper * (1 + 1e-9)


@given(seeds, st.sampled_from([1.0, 3.0, math.inf]), st.integers(1, 4))
def test_lp_greedy_bound(seed, p, n):
    K = _cloud(seed, p, dmax=4, mmax=6)
    tr = run_greedy(K, min(n, K.m))
    e = entropy_hull(ConvexHullSet(K), n)
    inv = 0.0 if math.isinf(p) else 1.0 / p
    dn = n ** abs(0.5 - inv)
    assert tr.sigmas[min(n, len(tr.sigmas) - 1)] <= dn * stirling_factor(n) * e.upper * (1 + 1e-9)


@given(seeds, st.integers(0, 5))
def test_hull_bracket_ordered_and_verified(seed, n):
    K = _cloud(seed)
    H = ConvexHullSet(K)
    e = entropy_hull(H, n, seed=seed)
    assert 0.0 <= e.lower <= e.upper
    assert e.witness.verify(H.sample(50, np.random.default_rng(seed + 1)))


@given(seeds, st.integers(0, 4))
def test_pointset_below_hull(seed, n):
    K = _cloud(seed, mmax=8)
    a = entropy_pointset(K, n)
    b = entropy_hull(ConvexHullSet(K), n)
    assert a.lower <= a.upper
    assert a.lower <= b.upper * (1 + 1e-12)


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_pointset_subadditive(seed, s, t):
    rng = np.random.default_rng(seed)
    sp = AmbientSpace.euclidean(3)
    A = PointCloud(rng.standard_normal((int(rng.integers(1, 10)), 3)), sp)
    B = PointCloud(rng.standard_normal((int(rng.integers(1, 10)), 3)) + 5.0, sp)
    ea, eb = entropy_pointset(A, s), entropy_pointset(B, t)
    AB = PointCloud(np.vstack([A.points, B.points]), sp)
    e = entropy_pointset(AB, s + t, candidates=[union_cover(ea.witness, eb.witness)])
    assert e.upper <= ea.upper + eb.upper + 1e-12


@given(seeds)
def test_projection_orthogonal(seed):
    rng = np.random.default_rng(seed)
    sp = AmbientSpace.euclidean(5, rng.uniform(0.5, 2.0, 5))
    b = OrthoBasis.empty(sp)
    for v in rng.standard_normal((3, 5)):
        b = extend_basis(b, v)
    v = rng.standard_normal(5)
    pr, res = project(b, v)
    for q in b.columns:
        assert abs(sp.inner(res, q)) <= 1e-12 * max(1.0, sp.norm(v))
    assert np.allclose(pr + res, v)


@given(seeds, st.sampled_from([1.0, 1.5, 3.0, math.inf]))
def test_dist_lp_bounded_by_norm(seed, p):
    rng = np.random.default_rng(seed)
    sp = AmbientSpace(4, p)
    B = rng.standard_normal((2, 4))
    v = rng.standard_normal(4)
    d = dist_lp(B, v, sp)
    assert 0.0 <= d <= sp.norm(v) + 1e-12
    assert dist_lp(B, B[0] * 2.5, sp) <= 1e-8 * sp.norm(B[0] * 2.5)


@given(seeds, st.sampled_from([1.0, 0.5]))
def test_oga_residuals_and_classical_bound(seed, gamma):
    rng = np.random.default_rng(seed)
    dim, k = int(rng.integers(2, 9)), int(rng.integers(2, 16))
    D = random_dictionary(rng, dim, k)
    f, _ = random_hull_point(rng, D)
    l1 = variation_norm(D, f).value
    tr = run_oga(D, f, min(dim, k), gamma, seed)
    r = np.asarray(tr.residual_norms)
    assert np.all(np.diff(r) <= 1e-12)
    for n in range(1, r.size):
        assert r[n] <= l1 / math.sqrt(1 + gamma ** 2 * n) * (1 + 1e-9)
    assert all(s >= -1e-10 for s in tr.recursion_slack)


@given(seeds)
def test_best_n_term_below_oga_and_pga(seed):
    rng = np.random.default_rng(seed)
    dim, k = int(rng.integers(2, 6)), int(rng.integers(2, 9))
    D = random_dictionary(rng, dim, k)
    f = rng.standard_normal(dim)
    nn = min(dim, k, 3)
    tr, pg = run_oga(D, f, nn), run_pga(D, f, nn)
    for n in range(1, len(tr.selected) + 1):
        e, _ = best_n_term(D, f, n)
        assert e <= tr.residual_norms[n] * (1 + 1e-10) + 1e-12 * np.linalg.norm(f)
    assert abs(pg.residual_norms[1] - tr.residual_norms[1]) <= 1e-12


@given(seeds, st.floats(-3, 3).filter(lambda c: abs(c) > 1e-3))
def test_variation_norm_homogeneous(seed, c):
    rng = np.random.default_rng(seed)
    D = random_dictionary(rng, 3, 7)
    f = rng.standard_normal(3)
    a, b = variation_norm(D, f).value, variation_norm(D, c * f).value
    assert abs(b - abs(c) * a) <= 1e-7 * max(1.0, abs(c) * a)


@given(seeds)
def test_recurrence_bound_holds(seed):
    rng = np.random.default_rng(seed)
    a = float(rng.uniform(0.01, 5))
    seq, bs = [a], []
    for _ in range(200):
        b = rng.uniform(0, 1.0 / a) if a > 0 else rng.uniform(0, 1)
        a = max(a * (1 - b * a) * rng.uniform(0.2, 1.0), 0.0)
        bs.append(b)
        seq.append(a)
    bound = recurrence_bound(seq[0], bs)
    assert all(x <= y * (1 + 1e-12) for x, y in zip(seq, bound))


@given(seeds, st.integers(1, 300))
def test_thomas_backends_agree(seed, n):
    rng = np.random.default_rng(seed)
    sub, sup = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
    diag = 2.5 + rng.uniform(0, 1, n)
    rhs = rng.standard_normal(n)
    outs = [m.thomas_solve(sub, diag, sup, rhs) for m in kernels.backends().values()]
    for x in outs[1:]:
        assert np.allclose(x, outs[0], rtol=1e-12, atol=1e-13)


@given(st.integers(0, 10 ** 6), st.floats(0.01, 1.0), st.integers(0, 50),
       st.sampled_from(["2", "2,4", "3.5"]))
def test_config_round_trip(seed, gamma, n_max, p):
    cfg = ExperimentConfig(seed=seed, gamma=gamma, n_max=n_max, p=p, out="res dir")
    back = ExperimentConfig.loads(cfg.dumps())
    assert back == cfg
    assert back.dumps() == cfg.dumps()
