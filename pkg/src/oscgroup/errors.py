"""Exception hierarchy shared by all modules."""


class OscGroupError(Exception):
    """Base class for library errors."""


class ParseError(OscGroupError, ValueError):
    """Malformed expression or scenario text.

    Attributes
    ----------
    offset : int
        Byte offset (UTF-8) in the source at which parsing failed.
    expected : str
        Description of what the parser expected at ``offset``.
    """

    def __init__(self, message, offset=0, expected=""):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.expected = expected


class DomainError(OscGroupError, ArithmeticError):
    """Evaluation outside the domain (division by zero, sqrt of negative, ...)."""


class QuadratureError(OscGroupError):
    """Adaptive quadrature failed to reach its tolerance."""


class IntegrationError(OscGroupError):
    """ODE integration failed (step size underflow)."""


class SingularTime(OscGroupError):
    """Requested time is at (or beyond) a singularity of the parameter flow."""


class ContextMismatch(OscGroupError):
    """Composed transforms do not chain source/target equations."""


class NotInvertible(OscGroupError):
    """Transform has no usable inverse."""


class GridTooCoarse(OscGroupError):
    """Sample block too small for the finite-difference stencils."""


class OverflowGuard(OscGroupError, OverflowError):
    """Requested quantum number beyond the supported range."""


class TruncationWarning(UserWarning):
    """Initial data does not decay at the grid edges."""
