import numpy as np
import pytest

from greedy_entropy import kernels
from greedy_entropy.simplex import linprog_bland

BACKENDS = kernels.backends()


def test_backend_selected():
    assert kernels.BACKEND in BACKENDS
    assert "python" in BACKENDS


@pytest.mark.parametrize("n", [1, 2, 7, 200])
def test_thomas_agree(n):
    rng = np.random.default_rng(n)
    sub, sup = rng.uniform(-1, 0, n), rng.uniform(-1, 0, n)
    diag = 2.5 + rng.uniform(0, 1, n)
    rhs = rng.standard_normal(n)
    A = np.diag(diag) + np.diag(sub[1:], -1) + np.diag(sup[:-1], 1)
    ref = np.linalg.solve(A, rhs)
    for name, mod in BACKENDS.items():
        x = mod.thomas_solve(sub, diag, sup, rhs)
        assert np.allclose(x, ref, rtol=1e-12, atol=1e-12), name


def test_thomas_readonly_input():
    d = np.full(5, 2.0)
    d.setflags(write=False)
    o = np.full(5, -1.0)
    o.setflags(write=False)
    for mod in BACKENDS.values():
        mod.thomas_solve(o, d, o, np.ones(5))


def test_thomas_zero_pivot():
    for mod in BACKENDS.values():
        with pytest.raises(ZeroDivisionError):
            mod.thomas_solve(np.zeros(2), np.zeros(2), np.zeros(2), np.ones(2))


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0, np.inf])
def test_farthest_point_agree(p):
    X = np.random.default_rng(1).standard_normal((60, 4))
    outs = {name: mod.farthest_point(X, 10, 0, p) for name, mod in BACKENDS.items()}
    ref_o, ref_r = outs["python"]
    for name, (o, r) in outs.items():
        assert np.array_equal(o, ref_o), name
        assert np.allclose(r, ref_r, rtol=1e-13), name
    assert np.all(np.diff(ref_r) <= 1e-12)


def test_best_subset_agree():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((9, 5))
    f = rng.standard_normal(5)
    G, b = A @ A.T, A @ f
    outs = {name: mod.best_subset(G, b, float(f @ f), 3, 1e-12) for name, mod in BACKENDS.items()}
    r0, i0, c0 = outs["python"]
    assert c0 == 84
    for name, (r, i, c) in outs.items():
        assert abs(r - r0) <= 1e-10 and np.array_equal(i, i0) and c == c0, name


def test_simplex_agree():
    rng = np.random.default_rng(4)
    A = rng.uniform(0, 1, (4, 8))
    b = A @ rng.uniform(0, 1, 8)
    c = rng.uniform(0.5, 2, 8)
    res = {}
    for name, mod in BACKENDS.items():
        saved = kernels.simplex_iterate
        kernels.simplex_iterate = mod.simplex_iterate
        try:
            res[name] = linprog_bland(c, A, b)
        finally:
            kernels.simplex_iterate = saved
    f0 = res["python"].fun
    for name, r in res.items():
        assert r.status == "optimal"
        assert abs(r.fun - f0) <= 1e-10, name


def test_pure_fallback_env(tmp_path):
    import os
    import subprocess
    import sys

    code = ("from greedy_entropy import kernels, run_oga, Dictionary; import numpy as np;"
            "assert kernels.BACKEND == 'python';"
            "from greedy_entropy.oga import best_n_term;"
            "D = Dictionary.from_atoms(np.eye(3)); print(best_n_term(D, np.array([3.0, 2.0, 1.0]), 2)[0])")
    env = dict(os.environ, GREEDY_ENTROPY_PURE="1")
    src = os.path.join(os.path.dirname(__file__), "..", "src")
    env["PYTHONPATH"] = src + os.pathsep + env.get("PYTHONPATH", "")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert float(out.stdout.strip()) == 1.0
