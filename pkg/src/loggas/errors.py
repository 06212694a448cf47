"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class ResourceError(RuntimeError):
    """Requested computation exceeds a configured size cap."""


class QuadratureError(ArithmeticError):
    """Quadrature failed to reach its tolerance.

    The best available estimate and its error bound are kept on the exception
    so callers can still report them.
    """

    def __init__(self, message: str, estimate=None, error: float = float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""
