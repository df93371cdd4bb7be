"""Failure types shared across solvers and predicates."""

from __future__ import annotations


class PreconditionError(Exception):
    """A theorem hypothesis failed; `details` names the violating data."""

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


class ResolutionError(Exception):
    """The search exhausted its grid and budget without a certifiable object.

    Carries the best residual found, so the caller can distinguish a
    discretization failure from a hypothesis failure.
    """

    def __init__(self, message: str, best_residual: float | None = None, **details):
        super().__init__(message)
        self.best_residual = best_residual
        self.details = details


class PreconditionWarning(UserWarning):
    """A soft precondition was violated; the operation still evaluated."""
