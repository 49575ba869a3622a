"""Exception hierarchy shared by all superlin modules."""


class SuperlinError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(SuperlinError, ValueError):
    """Dimension, shape, or index mismatch between operands."""


class SingularMatrix(SuperlinError, ArithmeticError):
    pass


class DegenerateBasis(SuperlinError, ValueError):
    pass


class NotVerified(SuperlinError):
    """The embedding does not satisfy the closure identities an operation requires."""


class UnsupportedReduction(SuperlinError):
    pass


class NotSingleVisible(SuperlinError):
    pass


class NotBalanced(SuperlinError):
    pass


class BlockStructureViolation(SuperlinError):
    pass


class UnsupportedControlField(SuperlinError):
    pass


class NotFound(SuperlinError):
    """Closure search exhausted its bounds.

    ``frontier`` holds the polynomials that would have had to be adjoined
    next; it is a report on the bounds, not a proof that no embedding exists.
    """

    def __init__(self, message, frontier=(), reason="bounds"):
        super().__init__(message)
        self.frontier = tuple(frontier)
        self.reason = reason


class DivergenceError(SuperlinError, ArithmeticError):
    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


class ParseError(SuperlinError, ValueError):
    pass


class SchemaError(SuperlinError, ValueError):
    pass
