#!/usr/bin/env python3
"""Benchmark the numba-compiled hot kernel against the pure-numpy fallback.

The double sum of difference quotients (the brute-force route to the
fractional seminorm) is the package's O(n^2) hot spot.  Run directly:

    python benchmarks/bench_kernels.py

The numpy path is what you get with NEELWALLS_NO_NUMBA=1.
"""

import time

import numpy as np

from neelwalls import _kernels


def timed(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        value = fn(*args)
        best = min(best, time.perf_counter() - start)
    return value, best


def main():
    print(f"compiled backend: {_kernels.backend()}")
    print(f"{'n':>8} {'numba [s]':>12} {'numpy [s]':>12} {'speedup':>9} {'rel diff':>10}")
    for n in (1024, 4096, 16384):
        x = np.linspace(-20.0, 20.0, n)
        f = np.exp(-np.abs(x)) + 0.5 * np.exp(-((x - 3.0) ** 2))
        slopes = np.gradient(f, x)
        if _kernels._double_sum_fast is not None:
            _kernels._double_sum_fast(f, x, slopes)  # compile once
            fast, t_fast = timed(_kernels._double_sum_fast, f, x, slopes)
        else:
            fast, t_fast = float("nan"), float("nan")
        slow, t_slow = timed(_kernels._double_sum_numpy, f, x, slopes)
        rel = abs(fast - slow) / slow if slow else 0.0
        print(f"{n:>8} {t_fast:>12.4f} {t_slow:>12.4f} {t_slow / t_fast:>9.1f} {rel:>10.2e}")


if __name__ == "__main__":
    main()
