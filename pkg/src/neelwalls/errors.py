"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class AccuracyError(RuntimeError):
    """A quadrature or iteration failed to reach the requested tolerance.

    Carries the best available estimate so callers can decide whether to
    proceed with degraded accuracy.
    """

    def __init__(self, message, best=None, error=None):
        super().__init__(message)
        self.best = best
        self.error = error
