"""Exception types raised by the library."""


class RmtDetectError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(RmtDetectError, ValueError):
    """An argument is outside the domain accepted by an operation."""


class DimensionError(InvalidArgumentError):
    """Matrix shapes do not agree."""


class NotHermitianError(InvalidArgumentError):
    """A matrix expected to be Hermitian is not, beyond tolerance."""


class SingularMatrixError(RmtDetectError, ArithmeticError):
    """A covariance matrix is not positive definite.

    Usually the sample count is smaller than the antenna count (N < P), so the
    sample covariance matrix has zero eigenvalues. Matrices are never
    regularized silently.
    """


class UnsupportedRegimeError(RmtDetectError, ValueError):
    """The aspect ratio c = P/N lies outside (0, 1)."""


class EigenConvergenceError(RmtDetectError, ArithmeticError):
    """The Hermitian eigensolver failed to converge."""
