"""Exception types shared across the toolkit."""


class DispcaError(Exception):
    """Base class for toolkit errors."""


class DimensionMismatchError(DispcaError, ValueError):
    """Operand shapes are incompatible."""


class NotCenteredError(DispcaError, ValueError):
    """Matrix fails the zero-column-mean precondition."""


class NotOrthonormalError(DispcaError, ValueError):
    """Basis matrix is not column-orthonormal at the required tolerance."""


class SvdConvergenceError(DispcaError, RuntimeError):
    """The underlying factorization failed to converge."""


class DegenerateTruthError(DispcaError, ValueError):
    """Ground truth has no positives or no negatives."""


class DataFormatError(DispcaError, ValueError):
    """Input data does not match the documented format."""


class InvalidConfigError(DispcaError, ValueError):
    """Traffic generator configuration failed validation."""
