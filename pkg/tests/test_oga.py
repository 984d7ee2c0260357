import math

import numpy as np
import pytest
from scipy.optimize import linprog

from greedy_entropy.errors import BudgetExceeded, NotInnerProductSpace
from greedy_entropy.linalg_core import AmbientSpace
from greedy_entropy.oga import (
    Dictionary,
    OgaTrace,
    best_n_term,
    check_recurrence,
    k_functional,
    random_dictionary,
    random_hull_point,
    recurrence_bound,
    relu_dictionary,
    run_oga,
    run_pga,
    run_rga,
    variation_norm,
)

E2 = Dictionary.from_atoms(np.eye(2))


def test_oga_two_atoms():
    tr = run_oga(E2, np.array([0.6, 0.8]), 2)
    assert tr.selected == [1, 0]
    assert np.allclose(tr.residual_norms, [1.0, 0.6, 0.0], atol=1e-15)
    assert np.allclose(run_pga(E2, np.array([0.6, 0.8]), 2).residual_norms, [1.0, 0.6, 0.0])
    assert np.allclose(run_rga(E2, np.array([0.6, 0.8]), 2).residual_norms[:2], [1.0, 0.6])


def test_oga_stops_on_orthogonal_residual():
    D = Dictionary.from_atoms([[1.0, 0.0, 0.0]])
    tr = run_oga(D, np.array([0.0, 1.0, 0.0]), 1)
    assert tr.selected == [] and tr.stop_cause == "residual orthogonal to dictionary"


def test_dictionary_requires_inner_product():
    with pytest.raises(NotInnerProductSpace):
        Dictionary(np.eye(2), AmbientSpace(2, 1.0))


def test_oga_recursion_and_serialisation():
    rng = np.random.default_rng(0)
    D = random_dictionary(rng, 8, 20)
    f, _ = random_hull_point(rng, D)
    tr = run_oga(D, f, 8)
    assert max(abs(s) for s in tr.recursion_slack) <= 1e-12
    back = OgaTrace.from_json(tr.to_json())
    assert back.selected == tr.selected
    assert tr.to_csv().splitlines()[0] == "step,atom_index,inner_product,residual_norm"


def test_variation_norm_example():
    D = Dictionary.from_atoms([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], normalize=False)
    v = variation_norm(D, np.array([0.5, 0.2]))
    assert math.isclose(v.value, 0.5, rel_tol=1e-9)
    assert math.isclose(variation_norm(E2, np.array([0.5, -0.3])).value, 0.8, rel_tol=1e-9)
    D2 = Dictionary.from_atoms([[1.0, 0.0]])
    assert variation_norm(D2, np.array([0.0, 1.0])).value == math.inf


def test_variation_norm_matches_scipy():
    rng = np.random.default_rng(4)
    D = random_dictionary(rng, 5, 12)
    f = rng.standard_normal(5)
    v = variation_norm(D, f).value
    A = D.atoms.T
    ref = linprog(np.ones(24), A_eq=np.hstack([A, -A]), b_eq=f, bounds=(0, None)).fun
    assert abs(v - ref) <= 1e-8 * ref


def test_best_n_term():
    D = Dictionary.from_atoms(np.eye(3))
    e, ix = best_n_term(D, np.array([3.0, 2.0, 1.0]), 2)
    assert math.isclose(e, 1.0) and sorted(ix.tolist()) == [0, 1]
    with pytest.raises(BudgetExceeded):
        best_n_term(random_dictionary(np.random.default_rng(0), 5, 40), np.ones(5), 5, budget=10)


def test_recurrence_bound():
    assert np.allclose(recurrence_bound(2.0, [1.0, 1.0]), [2.0, 1 / 1.5, 1 / 2.5])
    a = [1.0]
    bs = [0.5, 0.25, 1.0]
    for b in bs:
        a.append(a[-1] * (1 - b * a[-1]))
    r = check_recurrence(a, bs)
    assert r["passed"] and r["bound_violation"] is None
    assert check_recurrence([1.0, 1.0], [0.5])["recurrence_violation"] == 1
    with pytest.raises(ValueError):
        recurrence_bound(0.0, [1.0])


def test_k_functional_limits():
    rng = np.random.default_rng(1)
    D = random_dictionary(rng, 4, 10)
    f = rng.standard_normal(4)
    big = k_functional(D, f, 1e6)
    assert math.isclose(big.value, np.linalg.norm(f), rel_tol=1e-9)
    k = k_functional(D, f, 0.3)
    assert k.gap <= 1e-6 * np.linalg.norm(f)
    assert k.value <= np.linalg.norm(f) + 1e-12


def test_relu_dictionary():
    D, x = relu_dictionary(1, 50, 20)
    assert np.allclose(D.space.norms(D.atoms), 1.0)
    assert x.shape == (50,)
