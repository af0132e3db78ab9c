"""Numerics for interacting Neel walls in thin-film micromagnetics.

Evaluates and minimises the renormalised wall-interaction energies of the
confined (interval) and unconfined (whole-line, with anisotropy) models,
implements the underlying special function and limiting stray-field
potentials, and cross-validates the asymptotic energy expansion by direct
constrained minimisation of the full nonlocal energy.
"""

from .errors import AccuracyError, DomainError

__version__ = "0.1.0"

__all__ = ["AccuracyError", "DomainError", "__version__"]
