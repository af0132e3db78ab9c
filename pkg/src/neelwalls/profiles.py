"""Limiting piecewise-constant liftings and their quantised energy.

In the vanishing-parameter limit a lifting takes values in 2*pi*Z (+/-)
alpha almost everywhere; each jump decomposes uniquely into a monotone run
of elementary transitions of size +-2*alpha or +-2*(pi - alpha).  The
number of elementary transitions counts the walls; their quantised energy
is (pi/2) * sum (1 - cos(sigma/2))^2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import UNCONFINED, WallConfig

__all__ = [
    "StepFunction",
    "JumpAtom",
    "JumpDecomposition",
    "TransitionProfile",
    "decompose",
    "wall_count",
    "limit_energy",
    "is_simple",
    "transition_profile",
    "alternating_signs",
]

_TOL = 1e-9


def _lattice_residue(value: float, alpha: float) -> str:
    """Classify value as '+': 2*pi*Z + alpha, '-': 2*pi*Z - alpha, or raise."""
    r = math.remainder(value - alpha, 2.0 * math.pi)
    if abs(r) < _TOL:
        return "+"
    r = math.remainder(value + alpha, 2.0 * math.pi)
    if abs(r) < _TOL:
        return "-"
    raise DomainError(f"value {value} is not in 2*pi*Z +/- alpha for alpha={alpha}")


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant lifting: base value, jump locations, jump sizes.

    Locations are nondecreasing; every plateau value must lie in
    2*pi*Z +/- alpha, which constrains each jump to 2*pi*Z + {0, +-2*alpha}
    relative to the current plateau.  Zero jumps are rejected outright.
    """

    alpha: float
    base: float
    locations: np.ndarray
    sizes: np.ndarray

    def __post_init__(self):
        if not (0 < self.alpha < math.pi):
            raise DomainError("alpha must lie in (0, pi)")
        locations = np.atleast_1d(np.asarray(self.locations, dtype=float))
        sizes = np.atleast_1d(np.asarray(self.sizes, dtype=float))
        if locations.size == 0:
            locations = locations.reshape(0)
            sizes = sizes.reshape(0)
        object.__setattr__(self, "locations", locations)
        object.__setattr__(self, "sizes", sizes)
        if locations.shape != sizes.shape or locations.ndim != 1:
            raise DomainError("locations and sizes must be 1-d arrays of equal length")
        if locations.size > 1 and np.any(np.diff(locations) < 0):
            raise DomainError("jump locations must be nondecreasing")
        if np.any(np.abs(sizes) < _TOL):
            raise DomainError("zero-size jumps are not representable")
        # walk the plateaus; raises if any value leaves the lattice
        value = self.base
        _lattice_residue(value, self.alpha)
        for size in sizes:
            value += size
            _lattice_residue(value, self.alpha)

    @property
    def n_jumps(self) -> int:
        return int(self.sizes.size)

    def plateau_values(self) -> np.ndarray:
        return self.base + np.concatenate([[0.0], np.cumsum(self.sizes)])

    def to_json(self) -> str:
        return json.dumps(
            {
                "alpha": self.alpha,
                "base": self.base,
                "jumps": [
                    {"b": float(b), "size": float(s)}
                    for b, s in zip(self.locations, self.sizes)
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "StepFunction":
        data = json.loads(text)
        jumps = data.get("jumps", [])
        return cls(
            alpha=float(data["alpha"]),
            base=float(data["base"]),
            locations=np.array([j["b"] for j in jumps], dtype=float),
            sizes=np.array([j["size"] for j in jumps], dtype=float),
        )


@dataclass(frozen=True)
class JumpAtom:
    location: float
    size: float


@dataclass(frozen=True)
class JumpDecomposition:
    """Elementary transitions of sizes +-2*alpha, +-2*(pi - alpha).

    Atoms at coincident locations come from one raw jump, share its sign,
    and satisfy |sigma_{l-1} + sigma_l| = 2*pi (a strictly monotone
    decomposition), which makes the representation unique.
    """

    alpha: float
    atoms: tuple

    def locations(self) -> np.ndarray:
        return np.array([atom.location for atom in self.atoms])

    def sizes(self) -> np.ndarray:
        return np.array([atom.size for atom in self.atoms])

    def recompose(self) -> list:
        """Collapse coincident atoms back into (location, total size) pairs."""
        jumps = []
        for atom in self.atoms:
            if jumps and jumps[-1][0] == atom.location:
                jumps[-1] = (atom.location, jumps[-1][1] + atom.size)
            else:
                jumps.append((atom.location, atom.size))
        return jumps


@dataclass(frozen=True)
class TransitionProfile:
    """Ordered wall positions and signs extracted from a simple lifting."""

    a: np.ndarray
    d: np.ndarray

    def as_config(self, alpha: float, model: str = UNCONFINED) -> WallConfig:
        return WallConfig(model, self.a, self.d, alpha)


def _split_jump(value_before: float, size: float, alpha: float) -> list:
    """Split one raw jump into the unique monotone run of elementary atoms."""
    up = 2.0 * alpha
    down = 2.0 * (math.pi - alpha)
    sign = 1.0 if size > 0 else -1.0
    atoms = []
    remaining = size
    value = value_before
    guard = int(abs(size) / min(up, down)) + 3
    for _ in range(guard):
        if abs(remaining) < _TOL:
            return atoms
        residue = _lattice_residue(value, alpha)
        if sign > 0:
            step = up if residue == "-" else down
        else:
            step = -(down if residue == "-" else up)
        if abs(step) > abs(remaining) + _TOL:
            raise DomainError(
                f"jump of size {size} cannot be decomposed into elementary transitions"
            )
        atoms.append(step)
        remaining -= step
        value += step
    raise DomainError(f"jump of size {size} cannot be decomposed")


def decompose(step: StepFunction) -> JumpDecomposition:
    """Unique representation of the derivative as elementary transitions."""
    atoms = []
    values = step.plateau_values()
    for before, location, size in zip(values[:-1], step.locations, step.sizes):
        for piece in _split_jump(before, size, step.alpha):
            atoms.append(JumpAtom(float(location), float(piece)))
    return JumpDecomposition(step.alpha, tuple(atoms))


def wall_count(step: StepFunction) -> int:
    """Number of elementary walls encoded in the lifting."""
    return len(decompose(step).atoms)


def limit_energy(step: StepFunction) -> float:
    """Quantised limit energy (pi/2) * sum (1 - cos(sigma/2))^2 over atoms."""
    sizes = decompose(step).sizes()
    if sizes.size == 0:
        return 0.0
    return float(0.5 * math.pi * np.sum((1.0 - np.cos(0.5 * sizes)) ** 2))


def is_simple(step: StepFunction) -> bool:
    """True iff every raw jump is a single elementary transition at a
    strictly increasing sequence of locations."""
    if wall_count(step) != step.n_jumps:
        return False
    locations = step.locations
    return locations.size < 2 or bool(np.all(np.diff(locations) > 0))


def transition_profile(step: StepFunction) -> TransitionProfile:
    """Wall positions and signs of a simple lifting.

    Signs come from the jump magnitudes (2*alpha -> +1, 2*pi - 2*alpha -> -1)
    except at alpha = pi/2, where both magnitudes coincide and the sign is
    determined by the left limit: +1 iff the plateau before the jump lies in
    2*pi*Z - pi/2 and the jump is +pi, or in 2*pi*Z + pi/2 and the jump is
    -pi.
    """
    if not is_simple(step):
        raise DomainError("transition profile is defined only for simple liftings")
    alpha = step.alpha
    values = step.plateau_values()
    signs = []
    if abs(alpha - math.pi / 2) < _TOL:
        for before, size in zip(values[:-1], step.sizes):
            residue = _lattice_residue(before, alpha)
            positive = (residue == "-" and size > 0) or (residue == "+" and size < 0)
            signs.append(1 if positive else -1)
    else:
        for size in step.sizes:
            if abs(abs(size) - 2.0 * alpha) < _TOL:
                signs.append(1)
            else:
                signs.append(-1)
    return TransitionProfile(step.locations.copy(), np.array(signs, dtype=int))


def alternating_signs(n: int, leading: int = 1) -> np.ndarray:
    """The alternating sign vector (leading, -leading, leading, ...)."""
    if n < 1:
        raise DomainError("need at least one wall")
    if leading not in (-1, 1):
        raise DomainError("leading sign must be +1 or -1")
    signs = np.empty(n, dtype=int)
    signs[::2] = leading
    signs[1::2] = -leading
    return signs
