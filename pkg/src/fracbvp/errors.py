"""Exception hierarchy shared across the package."""


class FracBvpError(Exception):
    """Base class for all library errors."""


class DomainError(FracBvpError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(FracBvpError, ValueError):
    """A problem description violates a structural precondition."""


class GridMismatchError(FracBvpError):
    """Two grid functions living on different grids were combined."""


class NumericError(FracBvpError, ArithmeticError):
    """A computation produced non-finite values."""
