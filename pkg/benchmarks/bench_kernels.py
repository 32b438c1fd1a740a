"""Timing of the compiled grid kernels against the NumPy fallback.

Usage: python3 benchmarks/bench_kernels.py [--n 500 1000 2000] [--repeat 3]

Each row times one call of ``exp_sum_grid`` with the node count used by a
full selection path at sample size n (cut-off n, step 1/128), then
``poly_eval`` on a 2000-point x-grid, and checks that both backends agree.
"""
import argparse
import timeit

import numpy as np

from mellinsurv import _kernels_py

try:
    from mellinsurv import _kernels as _compiled
except ImportError:
    _compiled = None

T_STEP = 1.0 / 128


def time_call(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench(n, repeat, rng):
    y = rng.gamma(4.0, 2.0, n) * rng.uniform(size=n)
    weights, ell = np.sqrt(y) / n, np.log(y)
    m = int(round(n / T_STEP)) + 1
    coef = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    x = np.log(np.linspace(1e-3, 30.0, 2000))
    rows = []
    for name, args in (("exp_sum_grid", (weights, ell, T_STEP, m)), ("poly_eval", (coef, x, T_STEP))):
        py_fn = getattr(_kernels_py, name)
        py_time = time_call(lambda: py_fn(*args), repeat)
        if _compiled is None:
            rows.append((name, n, py_time, float("nan"), float("nan")))
            continue
        c_fn = getattr(_compiled, name)
        c_time = time_call(lambda: c_fn(*args), repeat)
        a, b = py_fn(*args), c_fn(*args)
        gap = float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), 1e-300))
        rows.append((name, n, py_time, c_time, gap))
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, nargs="+", default=[500, 1000, 2000])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    rng = np.random.default_rng(0)
    if _compiled is None:
        print("compiled extension not built; timing the NumPy fallback only")
    print(f"{'kernel':<13} {'n':>6} {'numpy s':>10} {'cython s':>10} {'speed-up':>9} {'rel. diff':>10}")
    for n in args.n:
        for name, size, py_t, c_t, gap in bench(n, args.repeat, rng):
            print(f"{name:<13} {size:>6} {py_t:>10.4f} {c_t:>10.4f} {py_t / c_t:>9.2f} {gap:>10.1e}")


if __name__ == "__main__":
    main()
