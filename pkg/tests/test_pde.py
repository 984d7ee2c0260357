import math

import numpy as np
import pytest

from greedy_entropy.errors import IterationBudgetExceeded
from greedy_entropy.greedy_rbm import run_greedy
from greedy_entropy.pde import (
    CoefficientFamily,
    EllipticProblem1D,
    EllipticProblem2D,
    ManifoldReport,
    h1_embedding_1d,
    h1_norm_1d,
    h1_space_1d,
    perturbation_check,
    perturbation_family,
    read_snapshots,
    sample_manifold,
    solve_1d,
    solve_2d,
    write_snapshots,
)


def test_constant_coefficient_exact():
    P = EllipticProblem1D(199, 1.0, 1.0)
    assert np.abs(solve_1d(P) - P.x * (1 - P.x) / 2).max() <= 1e-4


def test_second_order_convergence():
    a = lambda x: 1.0 + x  # noqa: E731
    f = lambda x: -math.pi * np.cos(math.pi * x) + (1 + x) * math.pi ** 2 * np.sin(math.pi * x)  # noqa: E731
    errs = []
    for n in (49, 99, 199):
        P = EllipticProblem1D(n, a, f, averaging="midpoint")
        errs.append(np.abs(solve_1d(P) - np.sin(math.pi * P.x)).max())
    assert errs[0] / errs[1] >= 3.5 and errs[1] / errs[2] >= 3.5


def test_h1_norm_consistent():
    P = EllipticProblem1D(99, 1.0, 1.0)
    u = solve_1d(P)
    sp = h1_space_1d(99)
    assert math.isclose(sp.norm(h1_embedding_1d(u, P.h)), h1_norm_1d(u, P.h), rel_tol=1e-12)
    # continuous value sqrt(1/120 + 1/12)
    assert abs(h1_norm_1d(solve_1d(EllipticProblem1D(399, 1.0, 1.0)), 1 / 400) - math.sqrt(1 / 120 + 1 / 12)) < 1e-5


def test_coefficient_validation():
    with pytest.raises(ValueError):
        EllipticProblem1D(9, -1.0, 1.0)
    with pytest.raises(ValueError):
        EllipticProblem1D(9, np.ones(3), 1.0)
    with pytest.raises(ValueError):
        CoefficientFamily("OTHER")


def test_2d_convergence():
    errs = []
    for n in (15, 31):
        P = EllipticProblem2D(n, np.ones((n + 2, n + 2)), lambda X, Y: 2 * math.pi ** 2 * np.sin(math.pi * X) * np.sin(math.pi * Y))
        X, Y = P.mesh()
        errs.append(np.abs(solve_2d(P) - np.sin(math.pi * X) * np.sin(math.pi * Y)).max())
    assert errs[0] / errs[1] >= 3.5


def test_cg_budget():
    P = EllipticProblem2D(15, np.ones((17, 17)), 1.0)
    with pytest.raises(IterationBudgetExceeded):
        solve_2d(P, max_iter=2)


def test_smooth_family_decay():
    fam = CoefficientFamily("HOLDER", 2.0, 32, seed=0, sample_count=64)
    K = sample_manifold(fam, 199)
    tr = run_greedy(K, 8)
    assert tr.sigmas[8] / tr.sigmas[1] <= 0.2
    assert tr.check_invariants() == []


def test_geometric_family_runs(tmp_path):
    fam = CoefficientFamily("GEOMETRIC", 0.5, 16, seed=1, sample_count=4)
    rep = ManifoldReport()
    K = sample_manifold(fam, 15, report=rep)
    assert K.m == 4 and rep.failed == []
    path = tmp_path / "snap.csv"
    write_snapshots(path, K, 15, fam.describe(), 1)
    K2, meta = read_snapshots(path)
    assert np.array_equal(K2.points, K.points) and meta["grid_n"] == "15"


def test_perturbation():
    fam = CoefficientFamily("HOLDER", 2.0, 16, seed=3)
    r = perturbation_check(fam.coefficient(0), fam.coefficient(1), 1.0, 4.0, 99)
    assert r["q"] == 4.0 and 0 < r["ratio"] < math.inf
    same = perturbation_check(fam.coefficient(0), fam.coefficient(0), 1.0, 2.0, 99)
    assert same["left"] == 0.0 and same["ratio"] == 0.0
    res = perturbation_family(fam, pairs=10, grid_n=99)
    assert res["finite"] and res["spread_ok"]


def test_scaling_and_zero_rhs():
    P = EllipticProblem1D(99, 2.0, 1.0)
    assert np.abs(solve_1d(P) - P.x * (1 - P.x) / 4).max() <= 1e-4
    assert np.all(solve_1d(EllipticProblem1D(99, 2.0, 0.0)) == 0.0)
    assert np.all(solve_2d(EllipticProblem2D(15, np.ones((17, 17)), 0.0)) == 0.0)


def test_maximum_principle():
    rng = np.random.default_rng(5)
    fam = CoefficientFamily("HOLDER", 1.0, 16, seed=2)
    for i in range(5):
        f = rng.uniform(0.0, 3.0, 99)
        assert solve_1d(EllipticProblem1D(99, fam.coefficient(i), f)).min() >= 0.0
    A = CoefficientFamily("GEOMETRIC", 0.5, 16, seed=4).geometric_field(0, 15)
    assert solve_2d(EllipticProblem2D(15, A, rng.uniform(0.0, 1.0, (15, 15)))).min() >= 0.0


def test_2d_symmetry():
    rng = np.random.default_rng(8)
    A = rng.uniform(1.0, 3.0, (17, 17))
    F = rng.uniform(0.0, 1.0, (15, 15))
    U = solve_2d(EllipticProblem2D(15, A + A.T, F + F.T))
    assert np.abs(U - U.T).max() <= 1e-8 * np.abs(U).max()


def test_single_snapshot_manifold():
    fam = CoefficientFamily("HOLDER", 2.0, 16, seed=0, sample_count=1)
    K = sample_manifold(fam, 99)
    tr = run_greedy(K, 1)
    u = solve_1d(EllipticProblem1D(99, fam.coefficient(0), 1.0))
    assert K.m == 1 and math.isclose(tr.sigmas[0], h1_norm_1d(u, 1.0 / 100), rel_tol=1e-12)
    assert tr.sigmas[1] == 0.0


def test_perturbation_linear_in_shift():
    a = CoefficientFamily("HOLDER", 2.0, 16, seed=6).coefficient(0)
    left = [perturbation_check(a, lambda x, e=e: a(x) + e, 1.0, 2.0, 99)["left"] for e in (1e-2, 1e-3, 1e-4)]
    assert 9.0 <= left[0] / left[1] <= 11.0 and 9.0 <= left[1] / left[2] <= 11.0


def test_geometric_decays_slower():
    smooth = run_greedy(sample_manifold(CoefficientFamily("HOLDER", 2.0, 32, seed=0, sample_count=16), 31), 6)
    geo = run_greedy(sample_manifold(CoefficientFamily("GEOMETRIC", 0.5, 16, seed=0, sample_count=16), 15), 6)
    assert geo.sigmas[6] / geo.sigmas[0] > smooth.sigmas[6] / smooth.sigmas[0]
