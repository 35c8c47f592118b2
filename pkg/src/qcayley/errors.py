"""Exception types shared across the package."""


class QCayleyError(Exception):
    """Base class for all package errors."""


class ExceptionalPointError(QCayleyError):
    """Raised when lambda sits (numerically) on the exceptional set.

    This covers zeros of S_m(l_m, lambda), vanishing multipliers, and the
    mu = +/-1 degeneracies where the resolvent kernel breaks down.
    """


class NoCandidateError(QCayleyError):
    """All multiplier candidates were rejected by the filter pipeline."""


class PathStallError(QCayleyError):
    """Continuation step size fell below the stall threshold."""


class ConfigError(QCayleyError):
    """Malformed run configuration (CLI / config file)."""
