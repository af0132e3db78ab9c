"""Renormalised wall-interaction energies: evaluation, gradients,
minimisation, and the sign combinatorics that decide whether minimisers
exist.

Confined model on (-1, 1):

    W(a, d) = -(pi/2) sum_n g_n^2 log(2 - 2 a_n^2)
              - (pi/2) sum_n sum_{k != n} g_k g_n log((1 + sqrt(1-r^2)) / r),

with r the pseudo-distance of the pair and g_n = d_n - cos(alpha) the wall
charges.  Unconfined model on the line:

    W(a, d) = -(pi/2) K0 sum_n g_n^2
              - (pi/2) sum_n sum_{k != n} g_k g_n K(|a_k - a_n|),

where K is the interaction kernel of :mod:`neelwalls.specfun` and K0 its
small-argument offset.  Neighbouring walls of equal sign attract (W drops
without bound as they merge); opposite signs repel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize as scipy_minimize

from . import specfun
from .errors import DomainError
from .geometry import CONFINED, UNCONFINED, WallConfig, wall_charges

__all__ = [
    "RenormResult",
    "AdmissibleRange",
    "MinimizeOptions",
    "MinimizeReport",
    "critical_angle",
    "admissible_angle_range",
    "charge_block_sum",
    "alternating_block_sum",
    "all_block_sums_negative",
    "energy_confined",
    "energy_unconfined",
    "renormalised_energy",
    "energy_gradient",
    "minimise",
    "minimise_multistart",
    "scan_path",
    "dilation_path",
    "block_collapse_path",
    "shrink_gap",
    "equidistant_critical_point",
]

_HALF_PI = 0.5 * math.pi


# ---------------------------------------------------------------------------
# result containers


@dataclass(frozen=True)
class RenormResult:
    """Value of W with its decomposition.

    self_terms[n] is the boundary/self-interaction contribution of wall n;
    pair_terms[k, n] (symmetric, zero diagonal) is the *total* interaction
    energy of the unordered pair {k, n}, so

        total = sum(self_terms) + sum of the upper triangle of pair_terms.

    status is 'ok', or 'plus-inf' / 'minus-inf' when coincident walls make
    the energy diverge (sign decided by the diverging charges product).
    """

    total: float
    self_terms: np.ndarray
    pair_terms: np.ndarray
    gradient: Optional[np.ndarray] = None
    status: str = "ok"


@dataclass(frozen=True)
class AdmissibleRange:
    """Open interval of transition angles with repulsion-dominated W."""

    lower: float
    upper: float
    case: str

    def __post_init__(self):
        if not (0 <= self.lower < self.upper <= math.pi):
            raise DomainError("admissible range must satisfy 0 <= lower < upper <= pi")

    def __contains__(self, alpha: float) -> bool:
        return self.lower < alpha < self.upper


@dataclass(frozen=True)
class MinimizeOptions:
    grad_tol: float = 1e-8
    max_iter: int = 500
    floor: float = -1e6
    gap_ceiling: float = 1e6

    def __post_init__(self):
        if self.grad_tol <= 0 or self.max_iter < 1:
            raise DomainError("invalid minimisation options")


@dataclass(frozen=True)
class MinimizeReport:
    """Outcome of a descent run on W.

    status is one of 'converged', 'diverging-to--inf', 'no-critical-point',
    'boundary-collapse', 'saddle-point', 'max-iter'.
    """

    positions: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    status: str


# ---------------------------------------------------------------------------
# angle thresholds and sign combinatorics


def critical_angle(n: int) -> float:
    """Threshold angle below which attraction of next-to-neighbouring walls
    can dominate; zero for n <= 2, increasing towards pi/2."""
    if n < 0:
        raise DomainError("wall count must be >= 0")
    if n <= 2:
        return 0.0
    if n % 2 == 1:
        return math.acos((math.sqrt(n + 1.0) - 1.0) / n)
    return math.acos((math.sqrt(n) - 1.0) / (n - 1.0))


def _require_alternating(d: np.ndarray):
    d = np.asarray(d, dtype=int)
    if d.size >= 2 and np.any(d[1:] + d[:-1] != 0):
        raise DomainError("signs must alternate")
    return d


def admissible_angle_range(n: int, d) -> AdmissibleRange:
    """The open angle interval on which W(., d) stays bounded below, for
    alternating signs d of length n >= 2."""
    d = _require_alternating(d)
    if n != d.size or n < 2:
        raise DomainError("need alternating signs of length n >= 2")
    if n % 2 == 0:
        return AdmissibleRange(critical_angle(n), math.pi - critical_angle(n), "even")
    if d[0] == 1:
        return AdmissibleRange(
            critical_angle(n - 2), math.pi - critical_angle(n), "odd-leading-plus"
        )
    return AdmissibleRange(
        critical_angle(n), math.pi - critical_angle(n - 2), "odd-leading-minus"
    )


def charge_block_sum(d, alpha: float, k_lo: int, k_hi: int) -> float:
    """sum_{k_lo <= k < l <= k_hi} g_k g_l over the charges g = d - cos(alpha).

    Block bounds are 1-based and inclusive, 1 <= k_lo < k_hi <= len(d).
    """
    d = np.asarray(d, dtype=int)
    if not (1 <= k_lo < k_hi <= d.size):
        raise DomainError(f"invalid block bounds ({k_lo}, {k_hi}) for {d.size} walls")
    g = d[k_lo - 1 : k_hi].astype(float) - math.cos(alpha)
    total = g.sum()
    return float(0.5 * (total * total - np.sum(g * g)))


def alternating_block_sum(length: int, alpha: float, leading: int) -> float:
    """Closed form of charge_block_sum for an alternating block.

    Even length: (K/2)((K-1) cos^2 a - 1) regardless of the leading sign;
    odd length: ((K-1)/2)(K cos^2 a -/+ 2 cos a - 1) for leading +1 / -1.
    """
    if length < 2:
        raise DomainError("block length must be >= 2")
    if leading not in (-1, 1):
        raise DomainError("leading sign must be +1 or -1")
    c = math.cos(alpha)
    k = float(length)
    if length % 2 == 0:
        return 0.5 * k * ((k - 1.0) * c * c - 1.0)
    return 0.5 * (k - 1.0) * (k * c * c - 2.0 * leading * c - 1.0)


def all_block_sums_negative(d, alpha: float) -> bool:
    """True iff every contiguous block sum of pairwise charge products is
    negative; for alternating signs this is equivalent to alpha lying in
    the admissible angle range."""
    d = np.asarray(d, dtype=int)
    for k_lo in range(1, d.size):
        for k_hi in range(k_lo + 1, d.size + 1):
            if charge_block_sum(d, alpha, k_lo, k_hi) >= 0:
                return False
    return True


# ---------------------------------------------------------------------------
# energy evaluation


def _confined_pair_kernel(b: float, c: float) -> float:
    """log((1 + sqrt(1 - r^2)) / r) for the pseudo-distance r of b, c."""
    if b == c:
        return math.inf
    r = abs(b - c) / (1.0 - b * c)
    return math.log1p(math.sqrt(max(0.0, 1.0 - r * r))) - math.log(r)


def _assemble(self_terms: np.ndarray, coeff: np.ndarray, kern: np.ndarray):
    """Combine self terms with the pair coefficient/kernel matrices."""
    pair = coeff * kern
    n = self_terms.size
    diverging = ~np.isfinite(pair)
    if np.any(diverging) or not np.all(np.isfinite(self_terms)):
        # coincident walls: the pair kernels blow up logarithmically, so the
        # sign of the total is the sign of the summed log-prefactors (all
        # collapsed pairs diverge at the same rate along a collapse path);
        # boundary contact always pushes the confined energy to +infinity
        weight = float(np.sum(coeff[diverging])) / 2.0
        if not np.all(np.isfinite(self_terms)):
            weight += math.inf
        status = "minus-inf" if weight < 0 else "plus-inf"
        total = -math.inf if weight < 0 else math.inf
        return RenormResult(total, self_terms, pair, status=status)
    iu = np.triu_indices(n, 1)
    total = float(np.sum(self_terms) + np.sum(pair[iu]))
    return RenormResult(total, self_terms, pair)


def _energy_confined_raw(a: np.ndarray, g: np.ndarray) -> RenormResult:
    n = a.size
    self_terms = -_HALF_PI * g * g * np.log(2.0 - 2.0 * a * a)
    coeff = np.zeros((n, n))
    kern = np.zeros((n, n))
    for k in range(n):
        for m in range(k + 1, n):
            coeff[k, m] = coeff[m, k] = -math.pi * g[k] * g[m]
            kern[k, m] = kern[m, k] = _confined_pair_kernel(a[k], a[m])
    return _assemble(self_terms, coeff, kern)


def _energy_unconfined_raw(a: np.ndarray, g: np.ndarray) -> RenormResult:
    n = a.size
    self_terms = np.full(n, -_HALF_PI * specfun.KERNEL_OFFSET) * g * g
    coeff = np.zeros((n, n))
    kern = np.zeros((n, n))
    for k in range(n):
        for m in range(k + 1, n):
            coeff[k, m] = coeff[m, k] = -math.pi * g[k] * g[m]
            gap = a[m] - a[k]
            kern[k, m] = kern[m, k] = (
                math.inf if gap == 0.0 else specfun.kernel(gap).value
            )
    return _assemble(self_terms, coeff, kern)


def energy_confined(config: WallConfig) -> RenormResult:
    """Renormalised energy of a confined configuration (W = 0 for N = 0)."""
    if config.model != CONFINED:
        raise DomainError("energy_confined requires a confined configuration")
    return _energy_confined_raw(config.a, wall_charges(config).values)


def energy_unconfined(config: WallConfig) -> RenormResult:
    """Renormalised energy of an unconfined configuration; depends only on
    the gaps, hence translation invariant."""
    if config.model != UNCONFINED:
        raise DomainError("energy_unconfined requires an unconfined configuration")
    return _energy_unconfined_raw(config.a, wall_charges(config).values)


def renormalised_energy(config: WallConfig) -> RenormResult:
    return (
        energy_confined(config)
        if config.model == CONFINED
        else energy_unconfined(config)
    )


# ---------------------------------------------------------------------------
# gradient


def _gradient_raw(model: str, a: np.ndarray, g: np.ndarray) -> np.ndarray:
    n = a.size
    grad = np.zeros(n)
    if n == 0:
        return grad
    if model == CONFINED:
        grad += math.pi * g * g * a / (1.0 - a * a)
        for k in range(n):
            for m in range(k + 1, n):
                denom = 1.0 - a[k] * a[m]
                r = (a[m] - a[k]) / denom
                if r <= 0.0 or r >= 1.0:
                    raise DomainError("gradient requires distinct interior walls")
                # d/dr log((1+sqrt(1-r^2))/r) = -1 / (r sqrt(1-r^2))
                dkern = -1.0 / (r * math.sqrt(1.0 - r * r))
                common = -math.pi * g[k] * g[m] * dkern / (denom * denom)
                grad[m] += common * (1.0 - a[k] * a[k])
                grad[k] -= common * (1.0 - a[m] * a[m])
        return grad
    for k in range(n):
        for m in range(k + 1, n):
            gap = a[m] - a[k]
            if gap <= 0.0:
                raise DomainError("gradient requires distinct walls")
            slope = specfun.kernel_deriv(gap).value
            grad[m] -= math.pi * g[k] * g[m] * slope
            grad[k] += math.pi * g[k] * g[m] * slope
    return grad


def energy_gradient(config: WallConfig) -> np.ndarray:
    """Analytic gradient of W with respect to the wall positions."""
    return _gradient_raw(config.model, config.a, wall_charges(config).values)


# ---------------------------------------------------------------------------
# minimisation in unconstrained coordinates


class _DescentStop(Exception):
    def __init__(self, status, positions=None):
        self.status = status
        self.positions = positions


def _positions_from(x: np.ndarray, model: str) -> np.ndarray:
    q = np.empty(x.size)
    q[0] = x[0]
    if x.size > 1:
        q[1:] = x[0] + np.cumsum(np.exp(x[1:]))
    return np.tanh(q) if model == CONFINED else q


def _coords_from(a: np.ndarray, model: str) -> np.ndarray:
    q = np.arctanh(a) if model == CONFINED else np.asarray(a, dtype=float)
    x = np.empty(q.size)
    x[0] = q[0]
    if q.size > 1:
        x[1:] = np.log(np.diff(q))
    return x


def _pullback_gradient(x: np.ndarray, a: np.ndarray, grad_a: np.ndarray, model: str):
    da_dq = (1.0 - a * a) if model == CONFINED else np.ones_like(a)
    gq = grad_a * da_dq
    out = np.empty_like(x)
    out[0] = gq.sum()
    if x.size > 1:
        # gap j moves every wall with index >= j
        out[1:] = np.exp(x[1:]) * np.cumsum(gq[::-1])[::-1][1:]
    return out


def minimise(
    config: WallConfig, options: MinimizeOptions = MinimizeOptions()
) -> MinimizeReport:
    """Quasi-Newton descent of W in (first position, log-gap) coordinates.

    The coordinates keep the ordering constraint satisfied by construction
    (and, for the confined model, map positions through tanh onto (-1, 1)).
    Divergence is reported rather than iterated on: the energy dropping
    below ``options.floor`` means W is unbounded below along the descent
    path; unconfined gaps exceeding ``options.gap_ceiling`` mean the walls
    spread out indefinitely and no critical point exists.
    """
    if config.n_walls == 0:
        return MinimizeReport(config.a.copy(), 0.0, 0.0, 0, "converged")
    g = wall_charges(config).values
    model = config.model
    evaluate = _energy_confined_raw if model == CONFINED else _energy_unconfined_raw

    penalty = (1e300, None)

    def objective(x):
        a = _positions_from(x, model)
        if not np.all(np.isfinite(a)):
            return penalty[0], np.zeros_like(x)
        if model == UNCONFINED and x.size > 1 and np.max(x[1:]) > math.log(
            options.gap_ceiling
        ):
            raise _DescentStop("no-critical-point", a)
        if model == CONFINED and np.any(1.0 - np.abs(a) < 1e-15):
            # tanh saturation: treat as an infinite-energy wall, back off
            return penalty[0], np.zeros_like(x)
        result = evaluate(a, g)
        if result.total == -math.inf or result.total < options.floor:
            raise _DescentStop("diverging-to--inf", a)
        if not math.isfinite(result.total):
            # repulsive coincidence: infinite barrier, line search backs off
            return penalty[0], np.zeros_like(x)
        grad_a = _gradient_raw(model, a, g)
        return result.total, _pullback_gradient(x, a, grad_a, model)

    x0 = _coords_from(config.a, model)
    last = {"x": x0}

    def record(xk):
        last["x"] = xk

    try:
        res = scipy_minimize(
            objective,
            x0,
            jac=True,
            method="BFGS",
            callback=record,
            options={"gtol": 1e-13, "maxiter": options.max_iter},
        )
        x_final, iterations = res.x, res.nit
    except _DescentStop as stop:
        a_last = _positions_from(last["x"], model)
        value = evaluate(a_last, g).total
        return MinimizeReport(a_last, value, math.nan, 0, stop.status)

    a = _positions_from(x_final, model)
    grad_a = _gradient_raw(model, a, g)
    grad_norm = float(np.max(np.abs(grad_a))) if a.size else 0.0
    if grad_norm > options.grad_tol:
        # BFGS line searches can stall just above the target; polish with
        # damped Newton steps on the finite-difference Hessian
        a, grad_norm = _newton_polish(model, a, g, options.grad_tol)
    result = evaluate(a, g)
    if grad_norm <= options.grad_tol and math.isfinite(result.total):
        if _is_local_minimum(model, a, g):
            return MinimizeReport(a, result.total, grad_norm, iterations, "converged")
        return MinimizeReport(a, result.total, grad_norm, iterations, "saddle-point")
    gaps = np.diff(a)
    squeezed = gaps.size and np.min(gaps) < 1e-12 * max(1.0, np.max(np.abs(a)))
    pinned = model == CONFINED and np.any(1.0 - np.abs(a) < 1e-12)
    if squeezed or pinned or not math.isfinite(result.total):
        if _unbounded_along_collapse(model, a, g):
            return MinimizeReport(a, result.total, grad_norm, iterations, "diverging-to--inf")
        return MinimizeReport(a, result.total, grad_norm, iterations, "boundary-collapse")
    return MinimizeReport(a, result.total, grad_norm, iterations, "max-iter")


def _fd_hessian(model: str, a: np.ndarray, g: np.ndarray, h: float = 1e-5) -> np.ndarray:
    n = a.size
    evaluate = _energy_confined_raw if model == CONFINED else _energy_unconfined_raw
    scale = max(1.0, float(np.max(np.abs(a)))) if n else 1.0
    step = h * scale
    hess = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            ei = np.zeros(n)
            ej = np.zeros(n)
            ei[i] = step
            ej[j] = step
            value = (
                evaluate(a + ei + ej, g).total
                - evaluate(a + ei - ej, g).total
                - evaluate(a - ei + ej, g).total
                + evaluate(a - ei - ej, g).total
            ) / (4.0 * step * step)
            hess[i, j] = hess[j, i] = value
    return hess


def _newton_polish(model: str, a: np.ndarray, g: np.ndarray, tol: float, steps: int = 8):
    """Damped Newton refinement near a stationary point."""
    best = a.copy()
    best_norm = float(np.max(np.abs(_gradient_raw(model, best, g))))
    for _ in range(steps):
        if best_norm <= tol / 10.0:
            break
        hess = _fd_hessian(model, best, g)
        grad = _gradient_raw(model, best, g)
        try:
            delta = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            break
        damping = 1.0
        improved = False
        for _ in range(10):
            trial = best - damping * delta
            if np.all(np.diff(trial) > 0) and (
                model != CONFINED or (trial[0] > -1 and trial[-1] < 1)
            ):
                norm = float(np.max(np.abs(_gradient_raw(model, trial, g))))
                if norm < best_norm:
                    best, best_norm, improved = trial, norm, True
                    break
            damping /= 2.0
        if not improved:
            break
    return best, best_norm


def _unbounded_along_collapse(model: str, a: np.ndarray, g: np.ndarray) -> bool:
    """At a configuration stopped by gap underflow, probe whether widening
    the collapsed gaps raises W; if so, W decreases without bound as the
    collapse continues (logarithmic attraction wins)."""
    if a.size < 2:
        return False
    evaluate = _energy_confined_raw if model == CONFINED else _energy_unconfined_raw
    gaps = np.diff(a)
    scale = max(np.max(gaps), 1e-12)
    collapsed = gaps < 1e-6 * scale if np.max(gaps) > 0 else gaps == gaps
    if not np.any(collapsed):
        return False

    def widened(factor: float) -> float:
        new_gaps = np.where(collapsed, np.maximum(gaps, 1e-290) * factor, gaps)
        new_a = np.concatenate([[a[0]], a[0] + np.cumsum(new_gaps)])
        if model == CONFINED:
            # recentre into (-1, 1) if widening pushed the last wall out
            span = new_a[-1] - new_a[0]
            if span >= 1.8:
                return math.nan
            new_a = new_a - new_a.mean()
        return evaluate(new_a, g).total

    w1, w2, w3 = widened(1.0), widened(1e4), widened(1e8)
    if any(map(math.isnan, (w1, w2, w3))):
        return False
    return w1 < w2 < w3


def _is_local_minimum(model: str, a: np.ndarray, g: np.ndarray, h: float = 1e-5) -> bool:
    """Finite-difference Hessian check in position space (N is small)."""
    if a.size == 0:
        return True
    eigenvalues = np.linalg.eigvalsh(_fd_hessian(model, a, g, h))
    return bool(eigenvalues.min() >= -1e-4 * max(1.0, abs(eigenvalues).max()))


def minimise_multistart(
    config: WallConfig,
    n_starts: int = 8,
    seed: int = 0,
    options: MinimizeOptions = MinimizeOptions(),
) -> list:
    """Independent descent runs from randomised starting configurations."""
    rng = np.random.default_rng(seed)
    reports = [minimise(config, options)]
    n = config.n_walls
    for _ in range(n_starts - 1):
        if config.model == CONFINED:
            a = np.sort(rng.uniform(-0.95, 0.95, size=n))
            while n > 1 and np.min(np.diff(a)) < 1e-3:
                a = np.sort(rng.uniform(-0.95, 0.95, size=n))
        else:
            gaps = rng.lognormal(mean=0.0, sigma=1.0, size=max(n - 1, 0))
            a = np.concatenate([[rng.normal(scale=2.0)], gaps]).cumsum()[:n]
        reports.append(minimise(replace(config, a=a), options))
    return reports


# ---------------------------------------------------------------------------
# landscape scans


def scan_path(
    config: WallConfig, path: Callable[[float], np.ndarray], etas
) -> list:
    """Tabulate (eta, W) along a parametrised family of positions."""
    rows = []
    for eta in np.asarray(etas, dtype=float):
        a = np.asarray(path(eta), dtype=float)
        result = renormalised_energy(replace(config, a=a))
        rows.append((float(eta), result.total))
    return rows


def dilation_path(a) -> Callable[[float], np.ndarray]:
    """eta -> eta * a: uniform collapse (eta -> 0) or spreading (eta -> inf)."""
    base = np.asarray(a, dtype=float)
    return lambda eta: eta * base


def block_collapse_path(a, k_lo: int, k_hi: int) -> Callable[[float], np.ndarray]:
    """Scale the walls with 1-based indices in [k_lo, k_hi] by eta, leaving
    the rest fixed; requires a[k_lo] < 0 < a[k_hi] so the scaled block stays
    strictly between its neighbours."""
    base = np.asarray(a, dtype=float)
    if not (1 <= k_lo < k_hi <= base.size):
        raise DomainError("invalid block bounds")
    if not (base[k_lo - 1] < 0.0 < base[k_hi - 1]):
        raise DomainError("collapse block must straddle zero")

    def path(eta: float) -> np.ndarray:
        out = base.copy()
        out[k_lo - 1 : k_hi] = eta * base[k_lo - 1 : k_hi]
        return out

    return path


def shrink_gap(a, gap_index: int, factor: float) -> np.ndarray:
    """Scale the gap between walls gap_index and gap_index + 1 (0-based) by
    ``factor``, translating the walls to the right accordingly."""
    a = np.asarray(a, dtype=float)
    if not (0 <= gap_index < a.size - 1):
        raise DomainError("gap index out of range")
    gap = a[gap_index + 1] - a[gap_index]
    shift = (factor - 1.0) * gap
    out = a.copy()
    out[gap_index + 1 :] += shift
    return out


# ---------------------------------------------------------------------------
# the three-wall critical point of the unconfined model


def equidistant_critical_point(alpha: float, d):
    """Unique critical point of the unconfined W for three alternating
    walls, when it exists.

    Stationarity forces equal gaps t and reduces to K'(2t) = c K'(t) with
    c = -g_2/g_1, solvable iff c lies in (1/8, 1/2), i.e. iff
    d_1 cos(alpha) is in (-7/9, -1/3).  Returns (t0, config, result) or
    None.  The critical point is a saddle, not a minimiser.
    """
    d = _require_alternating(np.asarray(d, dtype=int))
    if d.size != 3:
        raise DomainError("the equidistant critical point requires three walls")
    if not (0 < alpha < math.pi):
        raise DomainError("alpha must lie in (0, pi)")
    if not (-7.0 / 9.0 < d[0] * math.cos(alpha) < -1.0 / 3.0):
        return None
    g = d.astype(float) - math.cos(alpha)
    ratio = -g[1] / g[0]
    t0 = specfun.deriv_ratio_root(ratio)
    config = WallConfig(UNCONFINED, np.array([0.0, t0, 2.0 * t0]), d, alpha)
    result = replace(energy_unconfined(config), gradient=energy_gradient(config))
    return t0, config, result
