"""Wall configurations, the hyperbolic pseudo-distance, and Moebius maps.

A configuration is an ordered tuple of wall positions together with signs
and a transition angle.  In the confined model the positions live in
(-1, 1); in the unconfined model anywhere on the line.  The effective
charge of wall n is d_n - cos(alpha) and the sum of squared charges sets
the leading-order energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError

__all__ = [
    "CONFINED",
    "UNCONFINED",
    "WallConfig",
    "WallCharges",
    "pseudo_distance",
    "mobius",
    "half_min_gap",
    "wall_charges",
]

CONFINED = "confined"
UNCONFINED = "unconfined"


@dataclass(frozen=True)
class WallConfig:
    """Ordered wall positions a, signs d in {+-1}, transition angle alpha.

    Validation is strict: positions must be strictly increasing (and inside
    (-1, 1) for the confined model); silent repair would mask caller bugs.
    N = 0 is legal and means "no walls".
    """

    model: str
    a: np.ndarray
    d: np.ndarray
    alpha: float

    def __post_init__(self):
        if self.model not in (CONFINED, UNCONFINED):
            raise DomainError(f"unknown model {self.model!r}")
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        d = np.atleast_1d(np.asarray(self.d, dtype=int))
        if a.size == 0:
            a = a.reshape(0)
            d = d.reshape(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "d", d)
        if a.ndim != 1 or d.ndim != 1 or a.shape != d.shape:
            raise DomainError("positions and signs must be 1-d arrays of equal length")
        if not np.all(np.isin(d, (-1, 1))) and d.size:
            raise DomainError("signs must be +1 or -1")
        if a.size > 1 and not np.all(np.diff(a) > 0):
            raise DomainError("wall positions must be strictly increasing")
        if self.model == CONFINED and a.size and not (-1 < a[0] and a[-1] < 1):
            raise DomainError("confined walls must lie inside (-1, 1)")
        if not (0 < self.alpha < math.pi):
            raise DomainError("transition angle must lie in (0, pi)")

    @property
    def n_walls(self) -> int:
        return int(self.a.size)

    def shifted(self, offset: float) -> "WallConfig":
        if self.model != UNCONFINED:
            raise DomainError("only unconfined configurations can be shifted freely")
        return replace(self, a=self.a + offset)

    def reflected(self) -> "WallConfig":
        """Reflection x -> -x: reverses the position order and the signs list."""
        return replace(self, a=-self.a[::-1], d=self.d[::-1])


@dataclass(frozen=True)
class WallCharges:
    """Per-wall effective charges d_n - cos(alpha) and their squared sum."""

    values: np.ndarray
    total_square: float = field(default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "total_square", float(np.sum(self.values**2)))


def pseudo_distance(b: float, c: float) -> float:
    """|b - c| / (1 - b c) in [0, 1) for b, c in (-1, 1).

    Symmetric, zero iff b == c, and invariant under the Moebius transforms
    of the interval.
    """
    b, c = float(b), float(c)
    if not (-1 < b < 1 and -1 < c < 1):
        raise DomainError("pseudo_distance arguments must lie in (-1, 1)")
    return abs(b - c) / (1.0 - b * c)


def mobius(b: float, z):
    """Phi_b(z) = (z + b)/(1 + b z), a Moebius self-map of the half-plane.

    Real axis maps to real axis; the inverse of Phi_b is Phi_{-b}.
    """
    b = float(b)
    if not -1 < b < 1:
        raise DomainError("mobius parameter must lie in (-1, 1)")
    z = np.asarray(z)
    denom = 1.0 + b * z
    if np.any(np.abs(denom) < 1e-300):
        raise DomainError("mobius evaluated at its pole")
    result = (z + b) / denom
    if result.ndim == 0:
        return complex(result) if np.iscomplexobj(result) else float(result)
    return result


def half_min_gap(config: WallConfig) -> float:
    """Half the minimum separation scale of the configuration.

    Confined: half of min(2 a_1 + 2, gaps..., 2 - 2 a_N), so boundary
    distances count.  Unconfined: half of the minimum gap; +inf when there
    are fewer than two walls (nothing can collide).
    """
    a = config.a
    if config.model == CONFINED:
        if a.size == 0:
            return math.inf
        pieces = [2.0 * a[0] + 2.0, 2.0 - 2.0 * a[-1]]
        pieces.extend(np.diff(a).tolist())
        return 0.5 * min(pieces)
    if a.size < 2:
        return math.inf
    return 0.5 * float(np.min(np.diff(a)))


def wall_charges(config: WallConfig) -> WallCharges:
    """Effective charges d_n - cos(alpha) of the walls."""
    return WallCharges(config.d - math.cos(config.alpha))
