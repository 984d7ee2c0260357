import math

import numpy as np
import pytest

from greedy_entropy.entropy import (
    ConvexHullSet,
    EntropyEstimate,
    Method,
    carl_rate_check,
    delta_n_bound,
    entropy_hull,
    entropy_pointset,
    estimates_to_csv,
    fit_loglog_slope,
    log_ball_volume,
    maurey_sparsity,
    regularize,
    stirling_factor,
    volume_lower_bound,
)
from greedy_entropy.greedy_rbm import PointCloud, decaying_axes
from greedy_entropy.linalg_core import AmbientSpace


def test_ball_volumes():
    assert math.isclose(math.exp(log_ball_volume(2)), math.pi)
    assert math.isclose(math.exp(log_ball_volume(3)), 4 * math.pi / 3)
    assert math.isclose(math.exp(log_ball_volume(3, 1.0)), 8 / 6)
    assert math.isclose(math.exp(log_ball_volume(3, math.inf)), 8.0)


def test_stirling_anchors():
    assert math.isclose(stirling_factor(1), 2.0)
    assert math.isclose(stirling_factor(2), math.sqrt(2 * math.pi))
    lim = math.sqrt(2 * math.pi / math.e)
    assert abs(stirling_factor(100) / 10 - lim) / lim < 0.02
    assert math.isfinite(stirling_factor(10 ** 6))
    with pytest.raises(ValueError):
        stirling_factor(0)


def test_delta_n():
    assert delta_n_bound(2.0, 9) == 1.0
    assert math.isclose(delta_n_bound(math.inf, 16), 4.0)
    assert math.isclose(delta_n_bound(1.0, 16), 4.0)
    assert math.isclose(delta_n_bound(None, 16), 4.0)


def test_unit_square_exact():
    K = PointCloud.euclidean([[0, 0], [1, 0], [0, 1], [1, 1]])
    e = entropy_pointset(K, 1)
    assert math.isclose(e.lower, 0.5) and math.isclose(e.upper, 0.5)
    assert entropy_pointset(K, 2).upper == 0.0


def test_volume_lower_bound_examples():
    assert math.isclose(volume_lower_bound([[1.0, 0.0]]), 0.5)
    v = volume_lower_bound(np.eye(2))
    assert math.isclose(v, math.sqrt(2 / math.pi) / 2, rel_tol=1e-12)


def test_cross_polytope_volume_lower():
    e = entropy_hull(ConvexHullSet(PointCloud.euclidean(np.eye(5))), 5)
    assert math.isclose(e.lower, 1.0 / stirling_factor(5), rel_tol=1e-12)
    assert e.lower <= e.upper


def test_segment_bracket():
    H = ConvexHullSet(PointCloud.euclidean([[3.0, 4.0]]))
    for n in range(0, 6):
        e = entropy_hull(H, n)
        assert math.isclose(e.upper, 5.0 / 2 ** n)
        assert e.lower <= e.upper


def test_hull_upper_is_verified_cover():
    rng = np.random.default_rng(0)
    H = ConvexHullSet(PointCloud.euclidean(rng.standard_normal((8, 4))))
    e = entropy_hull(H, 6)
    pts = H.sample(300, np.random.default_rng(9))
    assert e.witness.verify(pts)
    assert e.witness.log2_count <= 6 + 1e-9


@pytest.mark.parametrize("p", [1.0, 4.0, math.inf])
def test_hull_lp_bracket(p):
    K = decaying_axes(np.array([1.0, 0.5, 0.25, 0.125]), p)
    ests = [entropy_hull(ConvexHullSet(K), n) for n in range(1, 7)]
    for e in ests:
        assert 0 <= e.lower <= e.upper
    lo, up = regularize(ests)
    assert all(a >= b for a, b in zip(up, up[1:]))
    assert all(a <= b for a, b in zip(lo, up))


def test_maurey_sparsity():
    assert maurey_sparsity(3, 0) == 0
    s = maurey_sparsity(10, 20)
    assert math.comb(20 + s, s) <= 2 ** 20 < math.comb(20 + s + 1, s + 1)


def test_estimate_validation_and_csv():
    with pytest.raises(ValueError):
        EntropyEstimate(1, 2.0, 1.0, Method.PACKING, Method.TRIVIAL)
    e = EntropyEstimate(1, 1.0 + 1e-14, 1.0, Method.PACKING, Method.TRIVIAL)
    assert e.lower == e.upper
    assert estimates_to_csv([e]).splitlines()[0] == "n,lower,upper,method_lower,method_upper"


def test_slopes_and_carl():
    ns = np.arange(1, 20)
    assert math.isclose(fit_loglog_slope(ns, ns ** -1.5), -1.5)
    r = carl_rate_check(ns ** -1.0, ns ** -1.2, alpha=1.0)
    assert r["passed"]
    assert not carl_rate_check(ns ** -1.0, ns ** -0.5)["passed"]
