"""Hot numeric kernels: numba-compiled with a pure-numpy fallback.

The O(n^2) double sum of the fractional-seminorm oracle dominates the
runtime of the evaluator comparisons; it is compiled with numba when
available.  Set the environment variable NEELWALLS_NO_NUMBA=1 to force the
chunked-numpy path (the benchmark in benchmarks/ compares both).
"""

import os

import numpy as np

__all__ = ["h12_double_sum", "backend"]

_FORCE_NUMPY = os.environ.get("NEELWALLS_NO_NUMBA", "").strip() not in ("", "0")


def _double_sum_numpy(f: np.ndarray, x: np.ndarray, slopes: np.ndarray) -> float:
    """sum_{i,j} ((f_i - f_j)/(x_i - x_j))^2 with slope^2 on the diagonal,
    chunked to keep the broadcast below ~32 MB."""
    n = f.size
    total = 0.0
    chunk = max(1, (1 << 22) // max(n, 1))
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        df = f[start:stop, None] - f[None, :]
        dx = x[start:stop, None] - x[None, :]
        np.fill_diagonal(dx[:, start:stop], 1.0)
        block = (df / dx) ** 2
        idx = np.arange(start, stop)
        block[idx - start, idx] = slopes[idx] ** 2
        total += float(block.sum())
    return total


if _FORCE_NUMPY:
    _double_sum_fast = None
else:
    try:
        import numba

        @numba.njit("f8(f8[:], f8[:], f8[:])", cache=True)
        def _double_sum_fast(f, x, slopes):  # pragma: no cover - compiled
            n = f.shape[0]
            total = 0.0
            for i in range(n):
                row = 0.0
                fi = f[i]
                xi = x[i]
                for j in range(n):
                    if i == j:
                        row += slopes[i] * slopes[i]
                    else:
                        q = (fi - f[j]) / (xi - x[j])
                        row += q * q
                total += row
            return total

    except Exception:  # pragma: no cover - numba missing or broken
        _double_sum_fast = None


def backend() -> str:
    return "numpy" if _double_sum_fast is None else "numba"


def h12_double_sum(f: np.ndarray, x: np.ndarray) -> float:
    """Brute-force double sum for the squared H^{1/2} seminorm:

        sum_{i,j} ((f(x_i) - f(x_j)) / (x_i - x_j))^2,

    where the diagonal carries the difference-quotient limit f'(x_i)^2.
    Multiply by h^2 / (2 pi) to approximate the seminorm squared.
    """
    f = np.ascontiguousarray(f, dtype=float)
    x = np.ascontiguousarray(x, dtype=float)
    slopes = np.gradient(f, x)
    if _double_sum_fast is not None:
        return float(_double_sum_fast(f, x, slopes))
    return _double_sum_numpy(f, x, slopes)
