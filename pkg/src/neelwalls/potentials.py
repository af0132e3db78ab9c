"""Limiting stray-field potentials on the upper half-plane.

Unconfined model: the conjugate pair (u, v) comes from one holomorphic
function on the half-plane,

    G(z) = e^{-iz} E1(-iz),      z = x1 + i x2,  x2 > 0,

with u = -Im G (the stray-field potential, odd in x1, |u| <= pi/2) and
v = Re G (the harmonic extension of the tail profile; boundary trace
v(x1, 0) = K(|x1|) with K the interaction kernel).  The formula follows
from the Fourier representation v-hat = pi e^{-|xi| x2} / (1 + |xi|) by
closing the contour; E1 is evaluated at -iz, which lies in the right half
plane, safely away from its branch cut.  Gradients come from
G' = -i G - 1/z, and |grad u|^2 = |grad v|^2 = |G'|^2.

Confined model: u = pi/2 - Im arccosh(-1/z), the pullback of the linear
strip solution under the conformal map w -> -1/cosh(w); walls at b != 0
are reached by composing with the Moebius transform.

Dirichlet energies use tensor-product midpoint rules on polar grids graded
logarithmically around the wall singularities, with analytic far-field
tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.ndimage import maximum_filter
from scipy.special import exp1

from . import specfun
from .errors import AccuracyError, DomainError
from .geometry import CONFINED, UNCONFINED, WallConfig, mobius, wall_charges

__all__ = [
    "FieldSample",
    "NearWallData",
    "stray_potential",
    "tail_potential",
    "stray_potential_confined",
    "stray_potential_sum",
    "tail_potential_sum",
    "tail_profile_sum",
    "near_wall_coefficients",
    "dirichlet_annulus",
    "cross_term",
    "cross_term_parts",
    "boundary_trace_square_integral",
    "near_wall_bracket",
    "near_wall_energy",
    "tail_energy_unconfined",
    "harmonicity_residual",
    "conjugacy_residual",
]


@dataclass(frozen=True)
class FieldSample:
    """A potential value at a half-plane point, with optional gradient."""

    x1: float
    x2: float
    value: float
    gradient: Optional[np.ndarray] = None


@dataclass(frozen=True)
class NearWallData:
    """Per-wall couplings of a multi-wall unconfined configuration.

    tail_coupling[n]   = sum_{k != n} g_k K(|a_k - a_n|)
    potential_offset[n] = sum_{k != n} g_k u_{a_k}(a_n, 0)
    """

    tail_coupling: np.ndarray
    potential_offset: np.ndarray


# ---------------------------------------------------------------------------
# complex potentials


def _to_z(x1, x2) -> np.ndarray:
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if np.any(x2 < 0):
        raise DomainError("potentials live on the closed upper half-plane")
    return x1 + 1j * x2


def _G(z: np.ndarray) -> np.ndarray:
    """e^{-iz} E1(-iz); -iz has nonnegative real part on the half-plane.

    Far from the origin the direct product overflows (|e^{-iz}| = e^{x2}),
    so the asymptotic expansion sum_k (-1)^k k! / (-iz)^{k+1} takes over;
    at |z| = 60 its truncation error is below 1e-13.
    """
    z = np.asarray(z, dtype=complex)
    far = np.abs(z) >= 60.0
    out = np.empty(z.shape, dtype=complex)
    near = ~far
    if np.any(near):
        zn = np.where(near, z, 1.0j)
        out[near] = (np.exp(-1j * zn) * exp1(-1j * zn))[near]
    if np.any(far):
        w = -1j * z[far]
        inv = 1.0 / w
        series = np.zeros_like(inv)
        term = inv.copy()
        for k in range(12):
            series += term
            term *= -(k + 1.0) * inv
        out[far] = series
    return out


def _G_prime(z: np.ndarray) -> np.ndarray:
    return -1j * _G(z) - 1.0 / z


def _conf_w(z: np.ndarray) -> np.ndarray:
    """arccosh(-1/z), branch in the semi-strip Re > 0, 0 < Im < pi.

    On the real axis the limit from above has Im(-1/z) = +0, so the signed
    zero is forced positive before taking arccosh.
    """
    z = np.asarray(z, dtype=complex)
    zeta = -1.0 / z
    on_axis = z.imag == 0.0
    if np.any(on_axis):
        zeta = np.where(on_axis, zeta.real + 0.0j, zeta)
    return np.arccosh(zeta)


def _conf_w_prime(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    zeta = -1.0 / z
    on_axis = z.imag == 0.0
    if np.any(on_axis):
        zeta = np.where(on_axis, zeta.real + 0.0j, zeta)
    return 1.0 / (np.sqrt(zeta - 1.0) * np.sqrt(zeta + 1.0) * z * z)


def _check_not_origin(z, wall: float):
    if np.any(np.abs(z - wall) == 0.0):
        raise DomainError("potential has a logarithmic singularity at the wall")


def stray_potential(x1, x2, wall: float = 0.0) -> FieldSample:
    """Unconfined stray-field potential u of a single wall at ``wall``.

    Odd in x1 - wall, |u| <= pi/2, jump of -pi across the wall along the
    boundary; behaves like -arctan((x1 - wall)/x2) near the wall.
    """
    z = _to_z(x1, x2) - wall
    _check_not_origin(z, 0.0)
    gp = _G_prime(z)
    return FieldSample(
        float(x1), float(x2), float(-_G(z).imag), np.array([-gp.imag, -gp.real])
    )


def tail_potential(x1, x2, wall: float = 0.0) -> FieldSample:
    """Unconfined conjugate potential v; boundary trace K(|x1 - wall|)."""
    z = _to_z(x1, x2) - wall
    _check_not_origin(z, 0.0)
    gp = _G_prime(z)
    return FieldSample(
        float(x1), float(x2), float(_G(z).real), np.array([gp.real, -gp.imag])
    )


def stray_potential_confined(x1, x2, wall: float = 0.0) -> FieldSample:
    """Confined stray-field potential of a wall at ``wall`` in (-1, 1).

    The wall at 0 is the strip pullback; other walls compose with the
    Moebius transform, under which the Dirichlet energy is invariant.
    Boundary values are +pi/2 on (-1, wall) and -pi/2 on (wall, 1).
    """
    if not -1 < wall < 1:
        raise DomainError("confined wall must lie in (-1, 1)")
    z = _to_z(x1, x2)
    if np.any(np.abs(z - wall) == 0.0) or np.any(np.abs(np.abs(z) - 1.0) == 0.0):
        raise DomainError("singular point of the confined potential")
    psi = mobius(-wall, z)
    value = 0.5 * math.pi - _conf_w(psi).imag
    dpsi = (1.0 - wall * wall) / (1.0 + (-wall) * z) ** 2
    wp = _conf_w_prime(psi) * dpsi
    return FieldSample(
        float(x1), float(x2), float(value), np.array([-wp.imag, -wp.real])
    )


def _single(model: str, x1, x2, wall: float) -> FieldSample:
    if model == CONFINED:
        return stray_potential_confined(x1, x2, wall)
    return stray_potential(x1, x2, wall)


def stray_potential_sum(config: WallConfig, x1, x2) -> FieldSample:
    """Superposed stray potential sum_n g_n u_{a_n} for either model."""
    charges = wall_charges(config).values
    value, grad = 0.0, np.zeros(2)
    for a_n, g_n in zip(config.a, charges):
        sample = _single(config.model, x1, x2, a_n)
        value += g_n * sample.value
        grad += g_n * sample.gradient
    return FieldSample(float(x1), float(x2), value, grad)


def tail_potential_sum(config: WallConfig, x1, x2) -> FieldSample:
    """Superposed conjugate potential sum_n g_n v_{a_n} (unconfined)."""
    if config.model != UNCONFINED:
        raise DomainError("tail potential is defined for the unconfined model")
    charges = wall_charges(config).values
    value, grad = 0.0, np.zeros(2)
    for a_n, g_n in zip(config.a, charges):
        sample = tail_potential(x1, x2, a_n)
        value += g_n * sample.value
        grad += g_n * sample.gradient
    return FieldSample(float(x1), float(x2), value, grad)


def tail_profile_sum(config: WallConfig, x1) -> np.ndarray:
    """Boundary tail profile sum_n g_n K(|x1 - a_n|) (unconfined trace)."""
    if config.model != UNCONFINED:
        raise DomainError("tail profile is defined for the unconfined model")
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    charges = wall_charges(config).values
    out = np.zeros_like(x1)
    for a_n, g_n in zip(config.a, charges):
        gaps = np.abs(x1 - a_n)
        if np.any(gaps == 0.0):
            raise DomainError("tail profile diverges at the wall positions")
        out += g_n * specfun.kernel_array(gaps)
    return out


def near_wall_coefficients(config: WallConfig) -> NearWallData:
    """Tail couplings and potential offsets felt by each wall from the rest."""
    if config.model != UNCONFINED:
        raise DomainError("near-wall data is defined for the unconfined model")
    charges = wall_charges(config).values
    n = config.n_walls
    lam = np.zeros(n)
    omega = np.zeros(n)
    for i in range(n):
        for k in range(n):
            if k == i:
                continue
            gap = abs(config.a[k] - config.a[i])
            lam[i] += charges[k] * specfun.kernel(gap).value
            omega[i] += charges[k] * stray_potential(config.a[i], 0.0, config.a[k]).value
    return NearWallData(lam, omega)


# ---------------------------------------------------------------------------
# Dirichlet integrals on polar grids


def _geometric_cells(inner: float, outer: float, n: int):
    edges = np.geomspace(inner, outer, n + 1)
    mids = np.sqrt(edges[:-1] * edges[1:])
    widths = np.diff(edges)
    return mids, widths


def _annulus_value(sq_gradient, inner, outer, n_radial, n_angular):
    rho, drho = _geometric_cells(inner, outer, n_radial)
    theta = (np.arange(n_angular) + 0.5) * math.pi / n_angular
    dtheta = math.pi / n_angular
    z = rho[:, None] * np.exp(1j * theta[None, :])
    return float(np.sum(sq_gradient(z) * rho[:, None] * drho[:, None]) * dtheta)


def dirichlet_annulus(
    model: str,
    wall: float,
    inner: float,
    outer: float,
    n_radial: int = 192,
    n_angular: int = 192,
    rel_tol: float = 0.02,
) -> float:
    """Dirichlet energy of the single-wall potential over the half-annulus
    inner < |x - (wall, 0)| < outer.

    Grows like pi log(outer/inner); the confined model requires
    outer <= 1 - |wall|.  Raises AccuracyError if doubling the grid moves
    the value by more than rel_tol.
    """
    if not 0 < inner < outer:
        raise DomainError("need 0 < inner < outer")
    if model == CONFINED:
        if not -1 < wall < 1:
            raise DomainError("confined wall must lie in (-1, 1)")
        if outer > 1.0 - abs(wall) + 1e-12:
            raise DomainError("outer radius exceeds the distance to the boundary")

        def sq_gradient(z):
            psi = mobius(-wall, z + wall)
            dpsi = (1.0 - wall * wall) / (1.0 + (-wall) * (z + wall)) ** 2
            return np.abs(_conf_w_prime(psi) * dpsi) ** 2

    elif model == UNCONFINED:
        sq_gradient = lambda z: np.abs(_G_prime(z)) ** 2
    else:
        raise DomainError(f"unknown model {model!r}")

    coarse = _annulus_value(sq_gradient, inner, outer, n_radial, n_angular)
    fine = _annulus_value(sq_gradient, inner, outer, 2 * n_radial, 2 * n_angular)
    if abs(fine - coarse) > rel_tol * max(1.0, abs(fine)):
        raise AccuracyError(
            "annulus quadrature not resolved", best=fine, error=abs(fine - coarse)
        )
    return fine


def _omega_dirichlet(
    positions: np.ndarray,
    charges: np.ndarray,
    excision: float,
    far_radius: float = 300.0,
    n_radial: int = 320,
    n_angular: int = 256,
) -> float:
    """int over {x2 > 0} minus the excision disks of |sum_n g_n grad u_{a_n}|^2
    for the unconfined model.

    The half-plane is partitioned into the vertical Voronoi strips of the
    walls; each strip is star-shaped about its wall, so a polar grid with a
    theta-dependent radial cutoff covers it exactly (no masking bias).  The
    far field beyond ``far_radius`` contributes the analytic tail of
    grad u* ~ (sum g_n) / z^2.
    """
    n = positions.size
    mids = 0.5 * (positions[1:] + positions[:-1])
    left = np.concatenate([[-math.inf], mids])
    right = np.concatenate([mids, [math.inf]])

    def sq_grad(z):
        total = np.zeros(z.shape, dtype=complex)
        for a_k, g_k in zip(positions, charges):
            total += g_k * _G_prime(z - a_k)
        return np.abs(total) ** 2

    theta = (np.arange(n_angular) + 0.5) * math.pi / n_angular
    dtheta = math.pi / n_angular
    cos_t = np.cos(theta)
    total = 0.0
    for i in range(n):
        cut = np.full(n_angular, far_radius)
        pos = cos_t > 1e-12
        neg = cos_t < -1e-12
        if math.isfinite(right[i]):
            cut[pos] = np.minimum(cut[pos], (right[i] - positions[i]) / cos_t[pos])
        if math.isfinite(left[i]):
            cut[neg] = np.minimum(cut[neg], (left[i] - positions[i]) / cos_t[neg])
        # geometric subdivision from the excision radius to the per-angle cut
        log_lo = math.log(excision)
        s = np.linspace(0.0, 1.0, n_radial + 1)[None, :]
        edges = np.exp(log_lo + (np.log(cut[:, None]) - log_lo) * s)
        rho = np.sqrt(edges[:, :-1] * edges[:, 1:])
        drho = np.diff(edges, axis=1)
        z = positions[i] + rho * np.exp(1j * theta[:, None])
        total += float(np.sum(sq_grad(z) * rho * drho) * dtheta)
    charge_sum = float(np.sum(charges))
    tail = 0.5 * math.pi * charge_sum**2 / far_radius**2
    return total + tail


def cross_term_parts(b: float, spec=specfun.DEFAULT_SPEC):
    """The two one-dimensional reductions of the tail-tail cross term of a
    wall pair at distance b: the half-plane gradient coupling
    pi int t cos t / (b + t)^2 dt and the boundary coupling
    pi b int cos t / (b + t)^2 dt."""
    if not b > 0:
        raise DomainError("pair distance must be positive")
    grad_part = math.pi * specfun.oscillatory_cos_integral(
        lambda t: t / (b + t) ** 2, spec, what=f"cross gradient b={b}"
    ).value
    boundary_part = b * math.pi * specfun.oscillatory_cos_integral(
        lambda t: 1.0 / (b + t) ** 2, spec, what=f"cross boundary b={b}"
    ).value
    return grad_part, boundary_part


def cross_term(b: float, spec=specfun.DEFAULT_SPEC) -> float:
    """Gradient coupling plus boundary coupling; equals pi K(b)."""
    grad_part, boundary_part = cross_term_parts(b, spec)
    return grad_part + boundary_part


@lru_cache(maxsize=None)
def boundary_trace_square_integral(
    head: float = 1e-9, mid: float = 100.0
) -> float:
    """int over the line of v(x1, 0)^2 dx1 = 2 int_0^inf K(x)^2 dx.

    The head piece uses the exact integral of (log(1/x) + K0)^2 (an
    incomplete-gamma identity); the far tail is bounded by K <= 1/x^2.
    """
    c = specfun.KERNEL_OFFSET
    level = math.log(1.0 / head)
    head_piece = head * ((level + c) ** 2 + 2.0 * (level + c) + 2.0)
    mid_piece, _ = quad(
        lambda x: specfun.kernel(x).value ** 2,
        head,
        mid,
        limit=400,
        epsabs=1e-12,
        epsrel=1e-11,
        points=[1e-6, 1e-3, 0.1, 1.0, 10.0],
    )
    tail_piece, _ = quad(lambda x: specfun.kernel(x).value ** 2, mid, np.inf, limit=200)
    return 2.0 * (head_piece + mid_piece + tail_piece)


def near_wall_bracket(r: float, far_radius: float = 300.0) -> float:
    """int over {x2>0} minus B_r of |grad v|^2, plus the boundary term
    int v(.,0)^2, minus pi log(1/r): converges to pi K0 as r -> 0."""
    if not 0 < r < 1:
        raise DomainError("excision radius must lie in (0, 1)")
    energy = _omega_dirichlet(np.array([0.0]), np.array([1.0]), r, far_radius)
    return energy + boundary_trace_square_integral() - math.pi * math.log(1.0 / r)


def _fit_excision_limit(radii: np.ndarray, values: np.ndarray) -> float:
    """Extrapolate A(r) = A0 + c1 r log(1/r) + c2 r to r = 0.

    Both correction terms are needed: with the r log(1/r) term alone the
    extrapolant misses the limit by ~20% from radii of order 0.1.
    """
    columns = [np.ones_like(radii), radii * np.log(1.0 / radii)]
    if radii.size >= 3:
        columns.append(radii)
    basis = np.column_stack(columns)
    coeffs, *_ = np.linalg.lstsq(basis, values, rcond=None)
    return float(coeffs[0])


def near_wall_energy(r_sequence, far_radius: float = 300.0) -> float:
    """Richardson-extrapolated near-wall energy; the limit is pi K0."""
    radii = np.asarray(sorted(r_sequence, reverse=True), dtype=float)
    if radii.size < 2:
        raise DomainError("need at least two radii to extrapolate")
    values = np.array([near_wall_bracket(r, far_radius) for r in radii])
    return _fit_excision_limit(radii, values)


def _tail_profile_square_integral(config: WallConfig, halfwidth: float = 100.0):
    """int of (sum_n g_n K(|x - a_n|))^2 over the line."""
    charges = wall_charges(config).values

    def integrand(x):
        total = 0.0
        for a_n, g_n in zip(config.a, charges):
            total += g_n * specfun.kernel(abs(x - a_n)).value
        return total * total

    lo = float(config.a[0] - halfwidth)
    hi = float(config.a[-1] + halfwidth)
    mid_piece, _ = quad(
        integrand,
        lo,
        hi,
        points=list(config.a),
        limit=600,
        epsabs=1e-11,
        epsrel=1e-10,
    )
    left_piece, _ = quad(integrand, -np.inf, lo, limit=200)
    right_piece, _ = quad(integrand, hi, np.inf, limit=200)
    return mid_piece + left_piece + right_piece


def tail_energy_unconfined(
    config: WallConfig, r_sequence, far_radius: float = 300.0
) -> float:
    """Tail interaction energy of the unconfined model:

        (1/2) lim_{r -> 0} [ int_{Omega_r} |grad u*|^2 + int (mu*)^2
                             - pi log(1/r) sum g_n^2 ],

    computed by quadrature and excision-limit extrapolation.  Equals the
    closed form (pi/2) K0 sum g_n^2 + (pi/2) sum_{k != n} g_k g_n K(gap),
    i.e. minus the renormalised energy.
    """
    if config.model != UNCONFINED:
        raise DomainError("tail energy is defined for the unconfined model")
    if config.n_walls == 0:
        return 0.0
    charges = wall_charges(config).values
    gamma_sq = float(np.sum(charges**2))
    radii = np.asarray(sorted(r_sequence, reverse=True), dtype=float)
    if radii.size < 2:
        raise DomainError("need at least two radii to extrapolate")
    if np.max(radii) > 0.45 * np.min(np.diff(config.a), initial=np.inf):
        raise DomainError("excision disks must stay disjoint")
    boundary = _tail_profile_square_integral(config)
    values = []
    for r in radii:
        field = _omega_dirichlet(config.a, charges, r, far_radius)
        values.append(
            0.5 * (field + boundary - math.pi * math.log(1.0 / r) * gamma_sq)
        )
    return _fit_excision_limit(radii, np.array(values))


# ---------------------------------------------------------------------------
# finite-difference validation utilities


def harmonicity_residual(
    field: Callable, x1_range, x2_range, spacing: float
) -> float:
    """Max over interior nodes of the 5-point Laplacian, normalised by the
    local second-derivative magnitude.

    ``field`` must accept numpy arrays (x1, x2).  The region must exclude
    singular points by a margin of a few spacings.
    """
    x1 = np.arange(x1_range[0], x1_range[1] + spacing / 2, spacing)
    x2 = np.arange(x2_range[0], x2_range[1] + spacing / 2, spacing)
    grid = field(x1[:, None], x2[None, :])
    centre = grid[1:-1, 1:-1]
    d2x = grid[2:, 1:-1] - 2.0 * centre + grid[:-2, 1:-1]
    d2y = grid[1:-1, 2:] - 2.0 * centre + grid[1:-1, :-2]
    laplacian = np.abs(d2x + d2y)
    # the pointwise Hessian can vanish along inflection lines, so the local
    # curvature scale is taken over a small neighbourhood
    scale = maximum_filter(np.abs(d2x) + np.abs(d2y), size=5, mode="nearest")
    floor = 1e-6 * float(np.max(scale)) + 1e-300
    return float(np.max(laplacian / np.maximum(scale, floor)))


def conjugacy_residual(
    u_field: Callable, v_field: Callable, x1_range, x2_range, spacing: float
) -> float:
    """Max residual of the conjugate relations d1 v = -d2 u, d2 v = d1 u,
    normalised by the largest gradient magnitude on the grid."""
    x1 = np.arange(x1_range[0], x1_range[1] + spacing / 2, spacing)
    x2 = np.arange(x2_range[0], x2_range[1] + spacing / 2, spacing)
    u = u_field(x1[:, None], x2[None, :])
    v = v_field(x1[:, None], x2[None, :])
    du1 = (u[2:, 1:-1] - u[:-2, 1:-1]) / (2 * spacing)
    du2 = (u[1:-1, 2:] - u[1:-1, :-2]) / (2 * spacing)
    dv1 = (v[2:, 1:-1] - v[:-2, 1:-1]) / (2 * spacing)
    dv2 = (v[1:-1, 2:] - v[1:-1, :-2]) / (2 * spacing)
    scale = float(np.max(np.hypot(dv1, dv2))) + 1e-300
    return float(
        max(np.max(np.abs(dv1 + du2)), np.max(np.abs(dv2 - du1))) / scale
    )
