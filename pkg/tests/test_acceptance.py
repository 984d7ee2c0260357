"""Acceptance suite: one test and one PASS/FAIL line per criterion.

Runs every experiment once at its default configuration (the criteria's
instance counts, dimensions and tolerances are the config defaults), then
reads the relevant verdicts. Run directly with ``python3 tests/test_acceptance.py``
or through pytest; the PASS/FAIL lines are printed in the terminal summary.
"""
import math
import os
import sys
import tempfile
import time

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from greedy_entropy.experiments import (  # noqa: E402
    ExperimentConfig,
    exp_lp_example,
    exp_oga_bounds,
    exp_pde,
    exp_properties,
    exp_rbm_theorem2,
)

RUNNERS = {
    "rbm-theorem2": exp_rbm_theorem2,
    "lp-example": exp_lp_example,
    "oga-bounds": exp_oga_bounds,
    "pde": exp_pde,
    "properties": exp_properties,
}
LINES = []
_CACHE = {}


def reports():
    if not _CACHE:
        t0 = time.perf_counter()
        for name, fn in RUNNERS.items():
            exp = name if name != "properties" else "selftest"
            _CACHE[name] = fn(ExperimentConfig(experiment=exp).validate())
        _CACHE["_runtime"] = time.perf_counter() - t0
    return _CACHE


def verdict(exp, vid):
    for v in reports()[exp].verdicts:
        if v.id == vid:
            return v
    raise KeyError(f"{exp}: no verdict {vid}")


def _detail(v):
    op = v.operands
    if "violations" in op:
        return f"{v.id} rows={op['rows']} violations={op['violations']}"
    if "slope" in op:
        return f"{v.id} slope={op['slope']:.4f} limit={op['limit']:.4f} window={op['window']}"
    return v.id


def record(label, ok, details):
    line = f"{'PASS' if ok else 'FAIL'} criterion {label}: " + "; ".join(details)
    LINES.append(line)
    print(line, flush=True)
    return ok


def check(label, pairs):
    vs = [verdict(e, i) for e, i in pairs]
    ok = record(label, all(v.passed for v in vs), [_detail(v) for v in vs])
    assert ok, LINES[-1]


def test_c01_volume_product():
    check("1 (volume product vs entropy, 50 random clouds, n <= 8)", [("rbm-theorem2", "volume_product")])


def test_c02_greedy_vs_entropy():
    check("2 (sigma_n bound, gamma in {1, 0.5})",
          [("rbm-theorem2", "greedy_vs_entropy"), ("rbm-theorem2", "weak_greedy_vs_entropy")])


def test_c03_lp_spaces():
    check("3 (delta_n bound in l_1 and l_inf)",
          [("lp-example", "banach_volume_product_p1"), ("lp-example", "banach_greedy_vs_entropy_p1"),
           ("lp-example", "banach_volume_product_pinf"), ("lp-example", "banach_greedy_vs_entropy_pinf")])


def test_c04a_dyadic_greedy():
    check("4a (dyadic construction: index order, sigma_n = x_{n+1} within 1e-12)",
          [("lp-example", "selection_order_p2"), ("lp-example", "sigma_closed_form_p2"),
           ("lp-example", "selection_order_p4"), ("lp-example", "sigma_closed_form_p4")])


def test_c04b_dyadic_entropy_rate():
    check("4b (entropy upper slope <= -alpha-1+1/p+0.2 on [8,32])",
          [("lp-example", "entropy_rate_p2"), ("lp-example", "entropy_rate_p4")])


def test_c05_oga_classical():
    check("5 (OGA classical bound, 200 instances)", [("oga-bounds", "oga_classical")])


def test_c06_oga_entropy():
    check("6 (OGA entropy bound and per-step recursion within 1e-10)",
          [("oga-bounds", "oga_entropy"), ("oga-bounds", "oga_recursion")])


def test_c07_recurrence():
    check("7 (sequence recurrence, 100 instances, n <= 1000)", [("properties", "recurrence_sum")])


def test_c08_stirling():
    st = reports()["properties"].tables["stirling"]
    gaps = dict(zip(st.column("n"), st.column("gap")))
    mono = gaps[10] > gaps[100] > gaps[1000]
    vs = [verdict("properties", "stirling_anchor"), verdict("properties", "stirling_monotone")]
    ok = record("8 (volume constant anchor at n = 100, monotone at 10, 100, 1000)",
                all(v.passed for v in vs) and mono,
                [_detail(v) for v in vs] + [f"gaps 10/100/1000 = {gaps[10]:.3e}/{gaps[100]:.3e}/{gaps[1000]:.3e}"])
    assert ok, LINES[-1]


def test_c09_pde():
    check("9 (solver anchors, order 2, smooth decay)",
          [("pde", "solver_constant"), ("pde", "solver_order"), ("pde", "smooth_decay")])


def test_c10_relu_rate():
    check("10 (soft: ReLU^1 OGA slope <= -0.75 on [4,20])", [("oga-bounds", "relu_oga_rate")])


def test_c11_best_n_term():
    check("11 (E_n <= OGA and E_n entropy bound, 100 instances)",
          [("oga-bounds", "best_n_term_vs_oga"), ("oga-bounds", "best_n_term_entropy")])


def test_c12_reproducible():
    details, ok = [], True
    with tempfile.TemporaryDirectory() as tmp:
        for name, fn in RUNNERS.items():
            first = reports()[name]
            exp = name if name != "properties" else "selftest"
            second = fn(ExperimentConfig(experiment=exp).validate())
            a = first.write(os.path.join(tmp, "a"))
            b = second.write(os.path.join(tmp, "b"))
            csvs = [(x, y) for x, y in zip(a, b) if x.endswith(".csv")]
            same = all(open(x, "rb").read() == open(y, "rb").read() for x, y in csvs)
            ok &= same and bool(csvs)
            details.append(f"{name}: {len(csvs)} CSVs {'identical' if same else 'DIFFER'}")
    ok = record("12 (bit-identical CSVs on rerun)", ok, details)
    assert ok, LINES[-1]


def test_runtime_budget():
    rt = reports()["_runtime"]
    ok = record("runtime (single pass of all experiments < 600 s)", rt < 600, [f"{rt:.1f} s"])
    assert ok


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
