"""Semantic exception hierarchy shared by all modules.

The CLI maps these onto process exit codes: rejected input / bad config -> 2,
accuracy or other numerical failures -> 3, I/O problems -> 4.
"""

from __future__ import annotations


class RmtJacobiError(Exception):
    """Base class for all errors raised by this package."""


class RejectedInputError(RmtJacobiError, ValueError):
    """An argument violates a documented precondition or invariant."""


class AccuracyError(RmtJacobiError, ArithmeticError):
    """A quadrature or solver could not reach the requested tolerance.

    Carries the best available estimate and an error bound so callers can
    decide whether to accept a degraded result.
    """

    def __init__(self, message: str, estimate: float | None = None,
                 error_bound: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class NumericalError(RmtJacobiError, ArithmeticError):
    """A numerical routine failed outright (eigensolver, root finder, ...)."""
