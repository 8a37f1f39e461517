"""Exception hierarchy shared by all isomel modules."""


class IsomelError(Exception):
    """Base class for library errors."""


class DomainError(IsomelError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericError(IsomelError, ArithmeticError):
    """A numerical procedure failed to converge or lost too much accuracy."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class TrajectoryError(NumericError):
    """A simulated trajectory left the period annulus or slid along the switching line."""


class PreconditionError(IsomelError, ValueError):
    """Structural hypotheses of an algorithm are violated."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class ParseError(IsomelError, ValueError):
    """Malformed input file."""
