"""Exception hierarchy shared across the package."""


class XXZGapError(Exception):
    """Base class for all package-specific errors."""


class DomainError(XXZGapError, ValueError):
    """A parameter is outside the mathematical domain of an operation
    (bad parity, out-of-range sector, invalid spin, ...)."""


class ResourceRefusal(XXZGapError):
    """The requested instance exceeds the desk-scale guardrails and was
    refused rather than attempted."""


class NonConvergenceError(XXZGapError):
    """Iterative eigensolver failed to converge.  Carries the best Ritz
    values found so the caller can inspect them."""

    def __init__(self, message, ritz_values=None, iterations=None):
        super().__init__(message)
        self.ritz_values = None if ritz_values is None else list(ritz_values)
        self.iterations = iterations


class ConsistencyError(XXZGapError):
    """An internal cross-check failed (e.g. the ground state was not
    annihilated, or the overlap matrix lost its top eigenvalue); this
    signals a bug or a truncation problem, not a user error."""
