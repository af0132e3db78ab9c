"""Independent numerical oracles used only by the test suite.

These deliberately avoid the quadrature machinery of the package: the
library integrates with Gauss-Laguerre / accelerated period sums, while the
oracles here use adaptive Simpson on truncated intervals and brute-force
finite differences.  Agreement between the two routes guards against a
shared bias.
"""

import math

import numpy as np


def adaptive_simpson(f, a, b, tol=1e-11, max_depth=40):
    """Classic recursive adaptive Simpson rule with Richardson correction."""

    def simpson(fa, fm, fb, h):
        return h / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return recurse(a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + recurse(
            m, b, fm, frm, fb, right, tol / 2.0, depth - 1
        )

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = simpson(fa, fm, fb, b - a)
    return recurse(a, b, fa, fm, fb, whole, tol, max_depth)


def kernel_simpson(t, truncation=50.0, tol=1e-11):
    """Oracle for the interaction kernel: adaptive Simpson on [0, truncation].

    The integrand s e^{-s}/(s^2 + t^2) has a sharp peak at s ~ t for small t,
    so the interval is split there to help the recursion.
    """
    f = lambda s: s * math.exp(-s) / (s * s + t * t)
    split = min(max(t, 1e-12), truncation / 2)
    return adaptive_simpson(f, 0.0, split, tol / 2) + adaptive_simpson(
        f, split, truncation, tol / 2
    )


def central_difference(f, x, h):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def gradient_fd(f, x, h):
    """Central finite-difference gradient of a scalar function of a vector."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        g[i] = (f(x + step) - f(x - step)) / (2.0 * h)
    return g


# Published value, used to cross-check the integral definition of the
# kernel's small-argument offset (minus the Euler-Mascheroni constant).
EULER_MASCHERONI_PUBLISHED = 0.57721566490153286061
