"""Discretised full wall energy: exchange + anisotropy + nonlocal stray field.

The energy of a magnetisation m = (cos phi, sin phi) on a 1-d grid is

    E = (eps/2) int |phi'|^2  [+ (1/2) int (m1 - cos alpha)^2, unconfined]
        + (1/2) || m1 - cos alpha ||^2_{H^{1/2}},

with the fractional seminorm computed spectrally (|xi| multiplier on the
zero-padded FFT) and, as an independent oracle, by the brute-force double
integral of difference quotients.  Constrained minimisation pins the
lifting at the nodes nearest to the prescribed wall positions and runs
Barzilai-Borwein descent with backtracking; the stray-field gradient is
assembled spectrally, keeping each iteration O(n log n).
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import DomainError
from .geometry import CONFINED, UNCONFINED, WallConfig, wall_charges

__all__ = [
    "Grid1D",
    "MagnetizationProfile",
    "SimulationParams",
    "EnergyBreakdown",
    "MinimizeEnergyReport",
    "ExpansionFit",
    "exchange_energy",
    "anisotropy_energy",
    "stray_energy_spectral",
    "stray_energy_double_integral",
    "stray_potential_solve",
    "total_energy",
    "initial_profile",
    "minimize_energy",
    "expansion_fit",
    "core_width",
    "profile_to_csv",
    "trace_to_csv",
]


def core_width(epsilon: float) -> float:
    """The natural small parameter of the expansion: eps * log(1/eps)."""
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    return epsilon * math.log(1.0 / epsilon)


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid with n nodes on [left, right] (powers of two preferred)."""

    left: float
    right: float
    n: int

    def __post_init__(self):
        if self.n < 16:
            raise DomainError("grid needs at least 16 nodes")
        if not self.right > self.left:
            raise DomainError("empty grid interval")

    @property
    def h(self) -> float:
        return (self.right - self.left) / (self.n - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(self.left, self.right, self.n)


@dataclass(frozen=True)
class MagnetizationProfile:
    """Lifting phi sampled on a grid; m = (cos phi, sin phi) has unit length
    by construction."""

    grid: Grid1D
    phi: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        object.__setattr__(self, "phi", phi)
        if phi.shape != (self.grid.n,):
            raise DomainError("phi must have one value per grid node")

    @property
    def m1(self) -> np.ndarray:
        return np.cos(self.phi)

    @property
    def m2(self) -> np.ndarray:
        return np.sin(self.phi)


@dataclass(frozen=True)
class SimulationParams:
    """Discretisation controls for the full-energy minimisation."""

    epsilon: float
    model: str = CONFINED
    truncation_halfwidth: Optional[float] = None
    n_nodes: int = 2**14
    pad_factor: int = 4
    pinning_tol_cells: int = 1
    grad_tol: float = 3e-10
    max_iter: int = 20000

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise DomainError("epsilon must lie in (0, 1)")
        if self.model not in (CONFINED, UNCONFINED):
            raise DomainError(f"unknown model {self.model!r}")
        if self.pad_factor < 1:
            raise DomainError("pad factor must be >= 1")

    @property
    def delta(self) -> float:
        return core_width(self.epsilon)


@dataclass(frozen=True)
class EnergyBreakdown:
    exchange: float
    anisotropy: float
    stray: float

    def __post_init__(self):
        if min(self.exchange, self.anisotropy, self.stray) < 0:
            raise DomainError("energy components must be nonnegative")

    @property
    def total(self) -> float:
        return self.exchange + self.anisotropy + self.stray


@dataclass(frozen=True)
class MinimizeEnergyReport:
    profile: MagnetizationProfile
    breakdown: EnergyBreakdown
    trace: np.ndarray  # columns: iteration, exchange, anisotropy, stray, total
    iterations: int
    status: str  # 'converged' | 'max-iter'
    grad_norm: float


@dataclass(frozen=True)
class ExpansionFit:
    """Least-squares fit E(eps) ~ A / log(1/delta) + B / log(1/delta)^2."""

    leading: float
    second: float
    residual: float
    energies: np.ndarray
    log_factors: np.ndarray


# ---------------------------------------------------------------------------
# energy components


def exchange_energy(profile: MagnetizationProfile, epsilon: float) -> float:
    """(eps/2) int |m'|^2 with |m'| = |phi'|, midpoint differences."""
    h = profile.grid.h
    diffs = np.diff(profile.phi)
    return 0.5 * epsilon * float(np.sum(diffs * diffs)) / h


def anisotropy_energy(
    profile: MagnetizationProfile, alpha: float, model: str = UNCONFINED
) -> float:
    """(1/2) int (m1 - cos alpha)^2; only the unconfined model carries it."""
    if model != UNCONFINED:
        raise DomainError("anisotropy energy exists only in the unconfined model")
    h = profile.grid.h
    deviation = profile.m1 - math.cos(alpha)
    return 0.5 * h * float(np.sum(deviation * deviation))


def _spectral_weights(n_pad: int, h: float) -> np.ndarray:
    return 2.0 * math.pi * np.abs(np.fft.rfftfreq(n_pad, d=h))


def stray_energy_spectral(f: np.ndarray, h: float, pad_factor: int = 4) -> float:
    """(1/2) ||f||^2_{H^{1/2}} by zero-padded FFT and the |xi| multiplier.

    f must decay to zero at both ends of its grid (it is implicitly extended
    by zero); a non-decayed endpoint triggers a truncation warning.
    """
    f = np.asarray(f, dtype=float)
    scale = float(np.max(np.abs(f))) if f.size else 0.0
    if scale > 0 and max(abs(f[0]), abs(f[-1])) > 1e-3 * scale:
        warnings.warn(
            "boundary data does not decay at the grid ends; "
            "the zero extension truncates the tails",
            RuntimeWarning,
            stacklevel=2,
        )
    n_pad = pad_factor * f.size
    spectrum = np.fft.rfft(f, n=n_pad)
    counted = _count_weights(_spectral_weights(n_pad, h), n_pad)
    seminorm_sq = (h / n_pad) * float(
        counted @ (spectrum.real**2 + spectrum.imag**2)
    )
    return 0.5 * seminorm_sq


def stray_energy_double_integral(f: np.ndarray, x: np.ndarray) -> float:
    """(1/2) ||f||^2 via the O(n^2) difference-quotient double sum (the
    brute-force oracle for the spectral evaluator).

    The seminorm is that of f extended by zero, so pairs with one argument
    beyond the grid still contribute f(s)^2/(s-t)^2; their t-integral is
    analytic and is added to the grid double sum (without it the oracle is
    biased low by O(integral of f^2 / grid half-width)).
    """
    f = np.asarray(f, dtype=float)
    x = np.asarray(x, dtype=float)
    if f.shape != x.shape:
        raise DomainError("boundary data and grid must have matching shapes")
    h = x[1] - x[0]
    interior = _kernels.h12_double_sum(f, x) * h * h
    right_edge = x[-1] + 0.5 * h
    left_edge = x[0] - 0.5 * h
    exterior = 2.0 * h * float(
        np.sum(f * f * (1.0 / (right_edge - x) + 1.0 / (x - left_edge)))
    )
    return 0.5 * (interior + exterior) / (2.0 * math.pi)


def stray_potential_solve(
    f: np.ndarray, h: float, heights: np.ndarray, pad_factor: int = 4
):
    """Harmonic extension of f to the half-plane and its conjugate.

    Returns (v, u): arrays of shape (len(heights), len(f)); v-hat is the
    boundary spectrum damped by e^{-|xi| x2}, u-hat the spectral rotation
    i sign(xi) v-hat.
    """
    f = np.asarray(f, dtype=float)
    heights = np.asarray(heights, dtype=float)
    if np.any(heights < 0):
        raise DomainError("heights must be nonnegative")
    n = f.size
    n_pad = pad_factor * n
    spectrum = np.fft.rfft(f, n=n_pad)
    xi = 2.0 * math.pi * np.fft.rfftfreq(n_pad, d=h)
    damp = np.exp(-np.outer(heights, xi))
    v = np.fft.irfft(damp * spectrum[None, :], n=n_pad, axis=1)[:, :n]
    rotation = 1j * np.sign(xi)
    u = np.fft.irfft(damp * rotation[None, :] * spectrum[None, :], n=n_pad, axis=1)[
        :, :n
    ]
    return v, u


def total_energy(
    profile: MagnetizationProfile, params: SimulationParams, alpha: float
) -> EnergyBreakdown:
    """Assemble the energy components (anisotropy only when unconfined)."""
    f = profile.m1 - math.cos(alpha)
    stray = stray_energy_spectral(f, profile.grid.h, params.pad_factor)
    aniso = (
        anisotropy_energy(profile, alpha, params.model)
        if params.model == UNCONFINED
        else 0.0
    )
    return EnergyBreakdown(exchange_energy(profile, params.epsilon), aniso, stray)


# ---------------------------------------------------------------------------
# constrained minimisation


def _plateau_walk(d: np.ndarray, alpha: float):
    """Plateau values and jump sizes of the monotone-when-alternating
    piecewise profile realising the signs d (cf. the lattice walk of the
    step-function module)."""
    plateaus = [-alpha]
    sizes = []
    for sign in d:
        on_minus = abs(math.remainder(plateaus[-1] + alpha, 2 * math.pi)) < 1e-9
        if sign == 1:
            size = 2 * alpha if on_minus else -2 * alpha
        else:
            size = 2 * (math.pi - alpha) if not on_minus else -2 * (math.pi - alpha)
        sizes.append(size)
        plateaus.append(plateaus[-1] + size)
    return np.array(plateaus), np.array(sizes)


def _build_grid(config: WallConfig, params: SimulationParams) -> Grid1D:
    if params.model == CONFINED:
        return Grid1D(-1.0, 1.0, params.n_nodes)
    span = float(config.a[-1] - config.a[0]) if config.n_walls else 0.0
    halfwidth = params.truncation_halfwidth
    if halfwidth is None:
        halfwidth = max(10.0, 10.0 * span)
    centre = float(0.5 * (config.a[-1] + config.a[0])) if config.n_walls else 0.0
    return Grid1D(centre - halfwidth, centre + halfwidth, params.n_nodes)


def initial_profile(
    config: WallConfig, params: SimulationParams
) -> tuple:
    """Arctan-shaped transitions of core width ~delta at each wall, pinned
    exactly to the crossing values at the nearest grid nodes.

    Returns (profile, pinned_mask).
    """
    if config.model != params.model:
        raise DomainError("configuration and parameters disagree on the model")
    grid = _build_grid(config, params)
    x = grid.nodes()
    plateaus, sizes = _plateau_walk(config.d, config.alpha)
    width = max(params.delta, 2.0 * grid.h)
    phi = np.full(grid.n, plateaus[0])
    for a_n, size in zip(config.a, sizes):
        phi = phi + size * (0.5 + np.arctan((x - a_n) / width) / math.pi)
    pinned = np.zeros(grid.n, dtype=bool)
    pinned[0] = pinned[-1] = True
    phi[0] = plateaus[0]
    phi[-1] = plateaus[-1]
    min_cells = max(4, 2 * params.pinning_tol_cells)
    indices = []
    for wall_index, a_n in enumerate(config.a):
        node = int(round((a_n - grid.left) / grid.h))
        if not 0 < node < grid.n - 1:
            raise DomainError("wall position outside the grid interior")
        if indices and node - indices[-1] < min_cells:
            raise DomainError("walls must be separated by at least 4 grid cells")
        indices.append(node)
        pinned[node] = True
        phi[node] = plateaus[wall_index] + 0.5 * sizes[wall_index]
    return MagnetizationProfile(grid, phi), pinned


def _count_weights(weights: np.ndarray, n_pad: int) -> np.ndarray:
    """rfft quadrature weights for the |xi| multiplier.

    Every frequency cell integrates |xi| exactly (|xi| is linear there)
    except the one containing 0, whose cell average is Delta xi / 4 rather
    than 0; without that correction the seminorm is biased low by
    O(|f-hat(0)|^2 Delta xi^2)."""
    counts = np.full(weights.size, 2.0)
    counts[0] = 1.0
    if n_pad % 2 == 0:
        counts[-1] = 1.0
    counted = counts * weights
    if weights.size > 1:
        counted[0] = 0.25 * weights[1]
    return counted


def _grad_weights(weights: np.ndarray) -> np.ndarray:
    out = weights.copy()
    if weights.size > 1:
        out[0] = 0.25 * weights[1]
    return out


def _descent_energy_grad(phi, x, h, alpha, params, weights, n_pad, counted=None, wgrad=None):
    cos_alpha = math.cos(alpha)
    m1 = np.cos(phi)
    f = m1 - cos_alpha
    spectrum = np.fft.rfft(f, n=n_pad)
    if counted is None:
        counted = _count_weights(weights, n_pad)
    if wgrad is None:
        wgrad = _grad_weights(weights)
    stray = 0.5 * (h / n_pad) * float(counted @ (spectrum.real**2 + spectrum.imag**2))
    # variational derivative of the seminorm: the |xi| multiplier applied to f
    multiplied = np.fft.irfft(wgrad * spectrum, n=n_pad)[: phi.size]
    diffs = np.diff(phi)
    exchange = 0.5 * params.epsilon * float(np.sum(diffs * diffs)) / h
    grad = np.zeros_like(phi)
    grad[1:-1] = params.epsilon * (2 * phi[1:-1] - phi[:-2] - phi[2:]) / h
    grad[0] = params.epsilon * (phi[0] - phi[1]) / h
    grad[-1] = params.epsilon * (phi[-1] - phi[-2]) / h
    sin_phi = np.sin(phi)
    grad -= h * multiplied * sin_phi
    aniso = 0.0
    if params.model == UNCONFINED:
        aniso = 0.5 * h * float(np.sum(f * f))
        grad -= h * f * sin_phi
    return exchange, aniso, stray, grad


def minimize_energy(
    config: WallConfig,
    params: SimulationParams,
    init: Optional[MagnetizationProfile] = None,
    pinned: Optional[np.ndarray] = None,
    record_trace: bool = True,
) -> MinimizeEnergyReport:
    """Barzilai-Borwein descent on the interior lifting values with pinned
    wall and boundary nodes.

    Monotone decrease is enforced by Armijo backtracking; the stray-field
    gradient is assembled spectrally each iteration.
    """
    if init is None or pinned is None:
        init, pinned = initial_profile(config, params)
    grid = init.grid
    x = grid.nodes()
    h = grid.h
    n_pad = params.pad_factor * grid.n
    weights = _spectral_weights(n_pad, h)
    counted = _count_weights(weights, n_pad)
    wgrad = _grad_weights(weights)
    free = ~pinned
    # inverse symbol of the energy Hessian, h (eps xi^2 + |xi| + 1); without
    # it the descent stalls on deceptive plateaus once eps/h^2 is large
    inverse_symbol = 1.0 / (h * (params.epsilon * weights**2 + weights + 1.0))

    def precondition(vector):
        smoothed = np.fft.irfft(
            inverse_symbol * np.fft.rfft(vector, n=n_pad), n=n_pad
        )[: vector.size]
        return np.where(free, smoothed, 0.0)

    phi = init.phi.copy()
    exchange, aniso, stray, grad = _descent_energy_grad(
        phi, x, h, config.alpha, params, weights, n_pad, counted, wgrad
    )
    energy = exchange + aniso + stray
    trace = [(0, exchange, aniso, stray, energy)]
    masked = np.where(free, grad, 0.0)
    direction = precondition(masked)
    step = 1.0
    prev_phi = None
    prev_dir = None
    status = "max-iter"
    iterations = params.max_iter
    for it in range(1, params.max_iter + 1):
        gnorm = float(np.max(np.abs(masked))) if np.any(free) else 0.0
        if gnorm <= params.grad_tol:
            status = "converged"
            iterations = it - 1
            break
        if prev_phi is not None:
            dphi = phi - prev_phi
            ddir = direction - prev_dir
            denom = float(dphi @ ddir)
            step = float(dphi @ dphi) / denom if denom > 0 else 1.0
        step = min(max(step, 1e-8), 1e8)
        prev_phi = phi.copy()
        prev_dir = direction.copy()
        slope = float(masked @ direction)
        trial_step = step
        for _ in range(60):
            candidate = phi - trial_step * direction
            e_x, e_a, e_s, g_new = _descent_energy_grad(
                candidate, x, h, config.alpha, params, weights, n_pad, counted, wgrad
            )
            if e_x + e_a + e_s <= energy - 1e-4 * trial_step * slope:
                break
            trial_step *= 0.5
        phi = candidate
        exchange, aniso, stray, grad = e_x, e_a, e_s, g_new
        energy = exchange + aniso + stray
        masked = np.where(free, grad, 0.0)
        direction = precondition(masked)
        if record_trace:
            trace.append((it, exchange, aniso, stray, energy))
    profile = MagnetizationProfile(grid, phi)
    breakdown = EnergyBreakdown(exchange, aniso, stray)
    gnorm = float(np.max(np.abs(grad[free]))) if np.any(free) else 0.0
    return MinimizeEnergyReport(
        profile, breakdown, np.array(trace), iterations, status, gnorm
    )


def expansion_fit(config: WallConfig, epsilons, params_template: SimulationParams):
    """Fit min E(eps) ~ A / log(1/delta) + B / log(1/delta)^2.

    Needs several epsilons spanning a couple of decades; A estimates the
    quantised leading coefficient (pi/2) * sum of squared charges, and
    differences of B between configurations estimate differences of the
    renormalised energy (the unknown core-energy sum cancels).
    """
    epsilons = np.asarray(sorted(epsilons, reverse=True), dtype=float)
    if epsilons.size < 3:
        raise DomainError("need at least three epsilon values to fit")
    energies = []
    factors = []
    warm: Optional[MagnetizationProfile] = None
    for eps in epsilons:
        params = SimulationParams(
            epsilon=float(eps),
            model=params_template.model,
            truncation_halfwidth=params_template.truncation_halfwidth,
            n_nodes=params_template.n_nodes,
            pad_factor=params_template.pad_factor,
            grad_tol=params_template.grad_tol,
            max_iter=params_template.max_iter,
        )
        init, pinned = initial_profile(config, params)
        if warm is not None:
            # the epsilon ladder is descending; the previous minimiser is an
            # excellent start (profiles differ only logarithmically)
            init = MagnetizationProfile(init.grid, warm.phi.copy())
        report = minimize_energy(config, params, init, pinned, record_trace=False)
        warm = report.profile
        energies.append(report.breakdown.total)
        factors.append(math.log(1.0 / params.delta))
    energies = np.array(energies)
    factors = np.array(factors)
    basis = np.column_stack([1.0 / factors, 1.0 / factors**2])
    coeffs, residual, *_ = np.linalg.lstsq(basis, energies, rcond=None)
    misfit = float(np.linalg.norm(basis @ coeffs - energies))
    return ExpansionFit(float(coeffs[0]), float(coeffs[1]), misfit, energies, factors)


# ---------------------------------------------------------------------------
# CSV snapshots


def profile_to_csv(profile: MagnetizationProfile, path):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x", "phi", "m1", "m2"])
        for x, phi, m1, m2 in zip(
            profile.grid.nodes(), profile.phi, profile.m1, profile.m2
        ):
            writer.writerow([repr(x), repr(phi), repr(m1), repr(m2)])


def trace_to_csv(trace: np.ndarray, path):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration", "exchange", "anisotropy", "stray", "total"])
        for row in trace:
            writer.writerow(
                [int(row[0]), repr(row[1]), repr(row[2]), repr(row[3]), repr(row[4])]
            )
