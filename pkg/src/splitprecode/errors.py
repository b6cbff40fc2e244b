"""Exception types shared across the package."""


class SplitPrecodeError(Exception):
    """Base class for all library errors."""


class ConfigError(SplitPrecodeError):
    """Invalid or inconsistent configuration."""


class DegenerateChannelError(SplitPrecodeError):
    """Channel realization is rank deficient or has zero rows where full rank is required."""


class DegenerateInputError(SplitPrecodeError):
    """Input data carries no usable information (e.g. all-zero calibration samples)."""


class NotPositiveDefiniteError(SplitPrecodeError):
    """Cholesky factorization failed; the Gram matrix is not positive definite."""


class SolverBudgetError(SplitPrecodeError):
    """Exact tree search would exceed the configured size budget."""
