"""Interaction kernel of the unconfined wall model and related constants.

The central object is the kernel

    K(t) = int_0^inf  s e^{-s} / (s^2 + t^2) ds,   t > 0,

which is logarithmic as t -> 0 (K(t) = log(1/t) + K0 + o(1), with K0 equal
to minus the Euler-Mascheroni constant) and decays like 1/t^2 at infinity.
It also admits the improper oscillatory representation

    K(t) = int_0^inf  cos(s) / (s + t) ds,

evaluated here by period-wise partial sums with alternating-series
acceleration.  Derivatives use the scaled form K(t) = int s e^{-st}/(s^2+1) ds:

    K'(t)  = -int_0^inf s^2 e^{-st} / (s^2 + 1) ds
    K''(t) =  int_0^inf s^3 e^{-st} / (s^2 + 1) ds = 1/t^2 - K(t),

the last identity from s^3/(s^2+1) = s - s/(s^2+1).

Primary quadrature is Gauss-Laguerre (the e^{-s} weight matches exactly);
an independent adaptive-Simpson oracle lives in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq
from scipy.special import roots_laguerre

from .errors import AccuracyError, DomainError

__all__ = [
    "EULER_MASCHERONI",
    "KERNEL_OFFSET",
    "QuadratureSpec",
    "SpecialValue",
    "DEFAULT_SPEC",
    "kernel",
    "kernel_array",
    "kernel_offset",
    "kernel_cosine_form",
    "kernel_deriv",
    "kernel_second_deriv",
    "deriv_ratio_root",
    "oscillatory_cos_integral",
]

EULER_MASCHERONI = 0.5772156649015328606
#: limit of kernel(t) + log(t) as t -> 0 (minus the Euler-Mascheroni constant)
KERNEL_OFFSET = -EULER_MASCHERONI


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy controls for the semi-infinite and oscillatory quadratures.

    abs_tol / rel_tol   target absolute / relative accuracy
    cutoff              truncation bound for exponentially weighted integrals
                        (e^{-60} ~ 9e-27, negligible at double precision)
    max_depth           maximum bisection depth for adaptive pieces
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    cutoff: float = 60.0
    max_depth: int = 40

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if not self.cutoff > 0:
            raise DomainError("cutoff must be positive")
        if self.max_depth < 1:
            raise DomainError("max_depth must be >= 1")

    def target(self, scale: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(scale))


@dataclass(frozen=True)
class SpecialValue:
    """A numeric value together with an estimated absolute error."""

    value: float
    error: float

    def __post_init__(self):
        if self.error < 0:
            raise DomainError("estimated error must be >= 0")

    def __float__(self):
        return float(self.value)


DEFAULT_SPEC = QuadratureSpec()

# Gauss-Laguerre node tables; n > 180 overflows in the weight recurrences.
_GL_ORDERS = (32, 64, 128, 180)


@lru_cache(maxsize=None)
def _laguerre(n: int):
    x, w = roots_laguerre(n)
    return x, w


@lru_cache(maxsize=None)
def _legendre(n: int):
    x, w = leggauss(n)
    return x, w


def _gauss_laguerre_adaptive(g, spec: QuadratureSpec, what: str):
    """Integrate g against e^{-s} on (0, inf), doubling the order until the
    change between successive orders drops below the tolerance."""
    prev = None
    best = None
    diff = math.inf
    for n in _GL_ORDERS:
        x, w = _laguerre(n)
        val = float(w @ g(x))
        if prev is not None:
            diff = abs(val - prev)
            best = val
            if diff <= spec.target(val):
                return val, diff
        prev = val
    raise AccuracyError(
        f"Gauss-Laguerre did not reach tolerance for {what}", best=best, error=diff
    )


def _panels(f, a: float, b: float, n_panels: int, n_nodes: int) -> float:
    """Composite Gauss-Legendre rule with equal panels on [a, b], vectorised."""
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    half = 0.5 * (edges[1] - edges[0])
    x, w = _legendre(n_nodes)
    return float(half * np.sum(f(mid + half * x[None, :]) @ w))


def _half_log1p_sq(t: float, v: np.ndarray) -> np.ndarray:
    """0.5 * log(1 + t^2 e^{2v}), stable for large v."""
    w = 2.0 * (v + math.log(t))
    big = w > 36.0
    out = np.empty_like(v)
    out[big] = v[big] + math.log(t) + 0.5 * np.log1p(np.exp(-w[big]))
    out[~big] = 0.5 * np.log1p(np.exp(w[~big]))
    return out


def _kernel_small_t(t: float, spec: QuadratureSpec):
    """K(t) = log(1/t) + K0 + D(t) with D(t) = int e^{-s} log sqrt(1 + t^2/s^2) ds.

    D is split at s = 1; the (0, 1) piece is mapped by s = e^{-v} onto a
    smooth exponentially weighted integrand.
    """

    def d_value(n_nodes: int) -> float:
        p1 = _panels(
            lambda v: np.exp(-v) * np.exp(-np.exp(-v)) * _half_log1p_sq(t, v),
            0.0,
            spec.cutoff,
            int(spec.cutoff),
            n_nodes,
        )
        p2 = _panels(
            lambda s: np.exp(-s) * 0.5 * np.log1p(t * t / (s * s)),
            1.0,
            spec.cutoff,
            max(8, int(spec.cutoff / 4)),
            n_nodes,
        )
        return p1 + p2

    coarse, fine = d_value(16), d_value(24)
    err = abs(fine - coarse)
    value = math.log(1.0 / t) + KERNEL_OFFSET + fine
    if err > spec.target(value):
        raise AccuracyError("kernel quadrature stalled", best=value, error=err)
    return value, err


def kernel(t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> SpecialValue:
    """Evaluate K(t) = int_0^inf s e^{-s}/(s^2 + t^2) ds for t > 0."""
    t = float(t)
    if not t > 0:
        raise DomainError(f"kernel requires t > 0, got {t}")
    if t < 1e-6:
        # asymptotic sandwich 0 <= K(t) + log t - K0 <= pi t / 2, midpoint value
        half_width = 0.25 * math.pi * t
        return SpecialValue(math.log(1.0 / t) + KERNEL_OFFSET + half_width, half_width)
    if t < 1.0:
        value, err = _kernel_small_t(t, spec)
        return SpecialValue(value, err)
    value, err = _gauss_laguerre_adaptive(
        lambda u: u / (u * u + t * t), spec, f"kernel({t})"
    )
    return SpecialValue(value, err)


def kernel_array(ts, spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """Vectorised kernel values for an array of positive arguments."""
    ts = np.asarray(ts, dtype=float)
    if np.any(ts <= 0):
        raise DomainError("kernel_array requires positive arguments")
    flat = ts.ravel()
    out = np.empty_like(flat)

    tiny = flat < 1e-6
    out[tiny] = np.log(1.0 / flat[tiny]) + KERNEL_OFFSET + 0.25 * math.pi * flat[tiny]

    small = (~tiny) & (flat < 1.0)
    for i in np.nonzero(small)[0]:
        out[i] = _kernel_small_t(flat[i], spec)[0]

    large = flat >= 1.0
    if np.any(large):
        x, w = _laguerre(_GL_ORDERS[-1])
        tl = flat[large]
        out[large] = (x[None, :] / (x[None, :] ** 2 + tl[:, None] ** 2)) @ w
    return out.reshape(ts.shape)


def kernel_offset(spec: QuadratureSpec = DEFAULT_SPEC) -> SpecialValue:
    """K0 = int_0^inf e^{-s} log s ds, computed from the integral definition.

    Equals minus the Euler-Mascheroni constant; the (0, 1) piece is mapped by
    s = e^{-v} to remove the logarithmic singularity.
    """

    def value(n_nodes: int) -> float:
        p1 = _panels(
            lambda v: -v * np.exp(-v) * np.exp(-np.exp(-v)),
            0.0,
            spec.cutoff,
            int(spec.cutoff),
            n_nodes,
        )
        p2 = _panels(
            lambda s: np.exp(-s) * np.log(s),
            1.0,
            spec.cutoff,
            max(8, int(spec.cutoff / 4)),
            n_nodes,
        )
        return p1 + p2

    coarse, fine = value(16), value(24)
    err = abs(fine - coarse)
    if err > spec.target(fine):
        raise AccuracyError("kernel_offset quadrature stalled", best=fine, error=err)
    return SpecialValue(fine, err)


def _adaptive_interval(f, a: float, b: float, tol: float, depth: int) -> tuple:
    """Adaptive Gauss-Legendre bisection on [a, b] (for head panels whose
    integrand may be sharply peaked at the left endpoint)."""
    x8, w8 = _legendre(8)
    x16, w16 = _legendre(16)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    coarse = half * float(w8 @ f(mid + half * x8))
    fine = half * float(w16 @ f(mid + half * x16))
    err = abs(fine - coarse)
    if err <= tol or depth <= 0:
        return fine, err
    lv, le = _adaptive_interval(f, a, mid, tol / 2, depth - 1)
    rv, re = _adaptive_interval(f, mid, b, tol / 2, depth - 1)
    return lv + rv, le + re


def oscillatory_cos_integral(g, spec: QuadratureSpec = DEFAULT_SPEC, what: str = "") -> SpecialValue:
    """int_0^inf g(s) cos(s) ds for smooth g >= 0 decaying (eventually
    monotonically) to zero.

    The integral converges as an improper Riemann integral by the alternating
    series criterion.  Strategy: integrate the head [0, pi/2] adaptively, then
    period by period over [k pi - pi/2, k pi + pi/2]; the period sums alternate
    in sign, so the partial sums are accelerated by repeated averaging
    (Euler / van Wijngaarden) until two successive accelerated values agree.
    """
    tol = spec.abs_tol
    head, head_err = _adaptive_interval(
        lambda s: g(s) * np.cos(s), 0.0, 0.5 * math.pi, tol / 4, spec.max_depth
    )
    x, w = _legendre(24)
    terms = []
    max_periods = 600
    for k in range(1, max_periods + 1):
        mid = k * math.pi
        half = 0.5 * math.pi
        s = mid + half * x
        terms.append(half * float(w @ (g(s) * np.cos(s))))
        if k < 8:
            continue
        partial = np.cumsum(terms)
        row = partial
        estimates = [row[-1]]
        for _ in range(min(len(row) - 1, 40)):
            row = 0.5 * (row[:-1] + row[1:])
            estimates.append(row[-1])
        if len(estimates) >= 3 and abs(estimates[-1] - estimates[-2]) < tol / 4:
            tail = estimates[-1]
            err = head_err + abs(estimates[-1] - estimates[-2]) + abs(
                estimates[-2] - estimates[-3]
            )
            return SpecialValue(head + tail, err)
    raise AccuracyError(
        f"oscillatory integral failed to converge {what}",
        best=head + estimates[-1],
        error=abs(estimates[-1] - estimates[-2]),
    )


def kernel_cosine_form(t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> SpecialValue:
    """K(t) through the oscillatory representation int_0^inf cos(s)/(s+t) ds."""
    t = float(t)
    if not t > 0:
        raise DomainError(f"kernel_cosine_form requires t > 0, got {t}")
    return oscillatory_cos_integral(lambda s: 1.0 / (s + t), spec, what=f"t={t}")


def _decay_aux(t: float, spec: QuadratureSpec):
    """f(t) = int_0^inf e^{-t v} / (1 + v^2) dv via v = sinh(theta).

    The substitution gives int_0^inf e^{-t sinh(theta)} / cosh(theta) dtheta,
    whose integrand is bounded by 2 e^{-theta} uniformly in t, so a fixed
    truncation works for every t.
    """
    theta_max = min(spec.cutoff, 50.0)

    def val(n_nodes):
        return _panels(
            lambda th: np.exp(-t * np.sinh(th)) / np.cosh(th),
            0.0,
            theta_max,
            int(theta_max),
            n_nodes,
        )

    coarse, fine = val(16), val(24)
    return fine, abs(fine - coarse)


def kernel_deriv(t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> SpecialValue:
    """K'(t) = -int_0^inf s^2 e^{-st}/(s^2+1) ds; always negative.

    For t >= 1 the scaled Gauss-Laguerre form -(1/t) int e^{-u} u^2/(u^2+t^2) du
    is accurate; below that, split off the exact -1/t part:
    K'(t) = -1/t + f(t) with f(t) = int_0^inf e^{-st}/(s^2+1) ds.
    """
    t = float(t)
    if not t > 0:
        raise DomainError(f"kernel_deriv requires t > 0, got {t}")
    if t >= 1.0:
        value, err = _gauss_laguerre_adaptive(
            lambda u: u * u / (u * u + t * t), spec, f"kernel_deriv({t})"
        )
        return SpecialValue(-value / t, err / t)
    f_val, f_err = _decay_aux(t, spec)
    return SpecialValue(f_val - 1.0 / t, f_err)


def kernel_second_deriv(t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> SpecialValue:
    """K''(t) = int_0^inf s^3 e^{-st}/(s^2+1) ds = 1/t^2 - K(t); always positive."""
    t = float(t)
    if not t > 0:
        raise DomainError(f"kernel_second_deriv requires t > 0, got {t}")
    base = kernel(t, spec)
    return SpecialValue(1.0 / (t * t) - base.value, base.error)


def deriv_ratio_root(q: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """The unique t0 > 0 with K'(2 t0) = q K'(t0), for q in (1/8, 1/2).

    The ratio K'(2t)/K'(t) maps (0, inf) onto (1/8, 1/2) bijectively, with
    limits 1/2 at 0 and 1/8 at infinity, so h(t) = K'(2t) - q K'(t) changes
    sign exactly once; a bracketing scan plus Brent's method finds the root.
    """
    q = float(q)
    if not (0.125 < q < 0.5):
        raise DomainError(f"ratio must lie in (1/8, 1/2), got {q}")

    def h(t):
        return kernel_deriv(2 * t, spec).value - q * kernel_deriv(t, spec).value

    grid = np.logspace(-8, 8, 81)
    values = [h(t) for t in grid]
    for i in range(len(grid) - 1):
        if values[i] == 0.0:
            return float(grid[i])
        if values[i] < 0 < values[i + 1]:
            return float(brentq(h, grid[i], grid[i + 1], xtol=1e-14, rtol=8.9e-16))
    raise AccuracyError(f"no sign change found for ratio {q}", best=None)
