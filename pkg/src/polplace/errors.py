"""Exception types raised by polplace."""


class PolplaceError(Exception):
    """Base class for all polplace errors."""


class DimensionMismatch(PolplaceError, ValueError):
    pass


class SingularMatrix(PolplaceError, ArithmeticError):
    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class UnpairedComplexRoot(PolplaceError, ValueError):
    pass


class NoConvergence(PolplaceError, ArithmeticError):
    """Root iteration hit its cap; carries the best iterate found."""

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class NotControllable(PolplaceError):
    def __init__(self, message, achieved=None, lengths=None):
        super().__init__(message)
        self.achieved = achieved
        self.lengths = lengths


class NotObservable(PolplaceError):
    def __init__(self, message, achieved=None, lengths=None):
        super().__init__(message)
        self.achieved = achieved
        self.lengths = lengths


class SingularTransform(PolplaceError, ArithmeticError):
    pass


class FormViolation(PolplaceError):
    """A transformed matrix misses its canonical template."""

    def __init__(self, message, entry=None, residual=None, tolerance=None):
        super().__init__(message)
        self.entry = entry
        self.residual = residual
        self.tolerance = tolerance


class UnsatisfiablePartition(PolplaceError, ValueError):
    pass


class Divergence(PolplaceError, ArithmeticError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ParseError(PolplaceError, ValueError):
    pass


class DimensionError(ParseError):
    pass
