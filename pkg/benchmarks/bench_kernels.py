#!/usr/bin/env python3
"""Benchmark the JIT kernels against their pure-numpy twins.

Usage:
    python3 benchmarks/bench_kernels.py [--rows 2000] [--cols 30] [--repeats 5]

The JIT path is warmed once before timing so compilation does not count.
"""

import argparse
import time

import numpy as np

from kgquiz import _kernels


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=2000)
    parser.add_argument("--cols", type=int, default=30)
    parser.add_argument("--epochs", type=int, default=500)
    parser.add_argument("--tau-n", type=int, default=3000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.RandomState(7)
    X = rng.normal(size=(args.rows, args.cols))
    y = (X[:, 0] + 0.3 * rng.normal(size=args.rows) > 0).astype(np.float64)
    a = rng.normal(size=args.tau_n)
    b = a + rng.normal(size=args.tau_n)

    print(f"{'kernel':<14} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    rows = [
        ("logreg_fit",
         lambda: _kernels.logreg_fit_numpy(X, y, 0.1, args.epochs, 0.01, 1e-9),
         lambda: _kernels._logreg_fit_jit(X, y, 0.1, args.epochs, 0.01, 1e-9)),
        ("tau_counts",
         lambda: _kernels.tau_counts_numpy(a, b),
         lambda: _kernels._tau_counts_jit(a, b)),
    ]
    for name, numpy_fn, jit_fn in rows:
        t_np = best_of(numpy_fn, args.repeats)
        if _kernels.HAVE_NUMBA:
            jit_fn()  # warm the compile cache
            t_nb = best_of(jit_fn, args.repeats)
            print(f"{name:<14} {t_np:>11.4f}s {t_nb:>11.4f}s {t_np / t_nb:>8.1f}x")
        else:
            print(f"{name:<14} {t_np:>11.4f}s {'n/a':>12} {'n/a':>9}")


if __name__ == "__main__":
    main()
