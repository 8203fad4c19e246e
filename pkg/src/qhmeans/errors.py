"""Exception types shared across the package."""


class QHMeansError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(QHMeansError, ValueError):
    """Operands have incompatible dimensions."""


class DomainError(QHMeansError, ValueError):
    """A value lies outside the mathematical domain of the operation."""


class ComputationError(QHMeansError, RuntimeError):
    """A numerical routine failed (e.g. eigensolver non-convergence)."""


class UnsupportedGeneratorError(QHMeansError, ValueError):
    """The generator kind is not valid for the requested operation."""


class UnsupportedVariantError(QHMeansError, TypeError):
    """The measure variant is not supported by the requested operation."""


class CommutativityError(QHMeansError, ValueError):
    """Inputs that are required to commute do not."""


class NonConvergenceError(QHMeansError, RuntimeError):
    """An iterative solver did not reach its tolerance."""


class DegenerateTrialError(QHMeansError, RuntimeError):
    """A property-test trial produced inputs too singular to evaluate."""
