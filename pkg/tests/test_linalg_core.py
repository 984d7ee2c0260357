import math

import numpy as np
import pytest
from scipy.optimize import linprog

from greedy_entropy.errors import DimensionMismatch, NotInnerProductSpace, RankDeficient
from greedy_entropy.linalg_core import (
    AmbientSpace,
    OrthoBasis,
    dist_lp,
    extend_basis,
    project,
    residual_norms,
)


def test_space_validation():
    with pytest.raises(ValueError):
        AmbientSpace(0)
    with pytest.raises(ValueError):
        AmbientSpace(3, 0.5)
    with pytest.raises(DimensionMismatch):
        AmbientSpace(3, 2.0, np.ones(2))
    with pytest.raises(ValueError):
        AmbientSpace(2, 2.0, np.array([1.0, 0.0]))


def test_weighted_norm_and_inner():
    sp = AmbientSpace.euclidean(2, np.array([4.0, 1.0]))
    v = np.array([1.0, 2.0])
    assert math.isclose(sp.norm(v), math.sqrt(4 + 4))
    assert math.isclose(sp.inner(v, v), sp.norm(v) ** 2)
    assert np.allclose(sp.from_flat(sp.to_flat(v)), v)


def test_lp_norms():
    v = np.array([3.0, -4.0])
    assert AmbientSpace(2, 1.0).norm(v) == 7.0
    assert AmbientSpace(2, math.inf).norm(v) == 4.0
    with pytest.raises(NotInnerProductSpace):
        AmbientSpace(2, 1.0).inner(v, v)


def test_project_and_extend():
    sp = AmbientSpace.euclidean(3)
    b = extend_basis(OrthoBasis.empty(sp), np.array([1.0, 1.0, 0.0]))
    pr, res = project(b, np.array([1.0, 0.0, 0.0]))
    assert np.allclose(pr, [0.5, 0.5, 0.0]) and np.allclose(res, [0.5, -0.5, 0.0])
    with pytest.raises(RankDeficient):
        extend_basis(b, np.array([2.0, 2.0, 0.0]))
    b2 = extend_basis(b, np.array([0.0, 0.0, 3.0]))
    assert b2.orthonormality_error() < 1e-14


def test_residual_norms_dependent():
    sp = AmbientSpace.euclidean(2)
    r = residual_norms([np.array([1.0, 0.0]), np.array([2.0, 0.0]), np.array([1.0, 1.0])], sp)
    assert np.allclose(r, [1.0, 0.0, 1.0])


@pytest.mark.parametrize("p", [1.0, math.inf])
def test_dist_lp_matches_scipy(p):
    rng = np.random.default_rng(0)
    B = rng.standard_normal((2, 5))
    y = rng.standard_normal(5)
    d = dist_lp(B, y, AmbientSpace(5, p))
    # oracle: scipy LP
    if p == 1.0:
        c = np.r_[np.zeros(2), np.ones(5)]
        A = np.block([[B.T, -np.eye(5)], [-B.T, -np.eye(5)]])
        bb = np.r_[y, -y]
    else:
        c = np.r_[np.zeros(2), 1.0]
        A = np.block([[B.T, -np.ones((5, 1))], [-B.T, -np.ones((5, 1))]])
        bb = np.r_[y, -y]
    ref = linprog(c, A_ub=A, b_ub=bb, bounds=[(None, None)] * 2 + [(0, None)] * (len(c) - 2)).fun
    assert abs(d - ref) <= 1e-8 * max(1.0, ref)


@pytest.mark.parametrize("p", [1.5, 3.0, 4.0])
def test_dist_lp_newton_is_minimal(p):
    rng = np.random.default_rng(1)
    sp = AmbientSpace(6, p)
    B = rng.standard_normal((2, 6))
    y = rng.standard_normal(6)
    info = dist_lp(B, y, sp, return_info=True)
    d = info.value
    assert abs(sp.norm(y - info.coefficients @ B) - d) <= 1e-9
    for _ in range(50):
        c = info.coefficients + 1e-3 * rng.standard_normal(2)
        assert sp.norm(y - c @ B) >= d - 1e-9


def test_dist_axis_exact_lp():
    sp = AmbientSpace(5, 4.0)
    B = np.eye(5)[:2]
    assert abs(dist_lp(B, 0.3 * np.eye(5)[3], sp) - 0.3) <= 1e-12
