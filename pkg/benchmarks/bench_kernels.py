"""Time the compiled kernels against the NumPy reference versions.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from greedy_entropy import kernels


def cases(rng):
    n = 20000
    sub, sup = -np.ones(n), -np.ones(n)
    diag = np.full(n, 2.5)
    rhs = rng.standard_normal(n)
    X = rng.standard_normal((2000, 16))
    A = rng.standard_normal((16, 10))
    f = rng.standard_normal(10)
    G, b = A @ A.T, A @ f
    M = rng.uniform(0, 1, (30, 60))
    rhs_lp = M @ rng.uniform(0, 1, 60)

    def simplex(mod):
        T = np.zeros((31, 91))
        T[:30, :60] = M
        T[:30, 60:90] = np.eye(30)
        T[:30, -1] = rhs_lp
        T[30, :60] = -M.sum(axis=0)
        T[30, -1] = -rhs_lp.sum()
        basis = np.arange(60, 90, dtype=np.intp)
        mod.simplex_iterate(T, basis, 90, 10000, 1e-10)

    return {
        "thomas_solve n=20000": lambda m: m.thomas_solve(sub, diag, sup, rhs),
        "farthest_point 2000x16 k=64": lambda m: m.farthest_point(X, 64, 0, 2.0),
        "best_subset C(16,4)": lambda m: m.best_subset(G, b, float(f @ f), 4, 1e-12),
        "simplex_iterate 30x90": simplex,
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    mods = kernels.backends()
    if "cython" not in mods:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'kernel':32s}" + "".join(f"{k:>14s}" for k in mods) + ("    speedup" if len(mods) > 1 else ""))
    for name, fn in cases(np.random.default_rng(0)).items():
        times = {}
        for k, m in mods.items():
            t = timeit.Timer(lambda: fn(m))
            loops, _ = t.autorange()
            times[k] = min(t.repeat(args.repeat, loops)) / loops
        row = f"{name:32s}" + "".join(f"{times[k] * 1e3:12.3f}ms" for k in mods)
        if "cython" in times:
            row += f"  {times['python'] / times['cython']:8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
