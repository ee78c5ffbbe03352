"""Exception hierarchy shared by all cantorlab modules."""


class CantorLabError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CantorLabError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class ResourceError(CantorLabError):
    """A depth or size guard was exceeded."""


class ScanExhaustedError(CantorLabError):
    """A bounded search window ended before a qualifying position was found."""


class NumericError(CantorLabError, ArithmeticError):
    """An iterative numerical method failed to converge."""
