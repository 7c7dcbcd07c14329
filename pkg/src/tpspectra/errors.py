"""Exception hierarchy shared by all modules."""


class TPSpectraError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(TPSpectraError, ValueError):
    pass


class IndexRangeError(TPSpectraError, IndexError):
    pass


class DomainError(TPSpectraError, ValueError):
    """Input outside the mathematical domain of an operation."""


class SingularMatrixError(TPSpectraError, ArithmeticError):
    """Raised when a matrix is (numerically) singular.

    ``determinant`` and ``condition`` carry whatever estimate was available
    at the point of failure; either may be ``None``.
    """

    def __init__(self, message, determinant=None, condition=None):
        super().__init__(message)
        self.determinant = determinant
        self.condition = condition


class ConvergenceError(TPSpectraError, ArithmeticError):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class TruncationError(TPSpectraError):
    """A truncation order or window is too small for the requested result."""


class ResourceLimitError(TPSpectraError):
    """A combinatorial cap (enumeration size, minor size, window) was exceeded."""


class ConfigError(TPSpectraError, ValueError):
    pass
