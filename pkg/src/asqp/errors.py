"""Exception types shared across the package."""


class AsqpError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(AsqpError, ValueError):
    """Operand shapes are inconsistent with the declared problem sizes."""


class PivotBreakdown(AsqpError, ArithmeticError):
    """A pivot fell below the positivity floor during factorization.

    Signals that the supplied matrix is not positive definite (or is so
    badly scaled that elimination without pivoting cannot proceed).
    """


class CapacityExceeded(AsqpError, RuntimeError):
    """The preallocated active-set workspace is full."""


class NotPositiveDefinite(AsqpError, ValueError):
    """A weight or Hessian matrix required to be positive definite is not."""


class SizeLimit(AsqpError, ValueError):
    """Problem dimensions exceed a combinatorial safety guard."""


class WindowOutOfRange(AsqpError, ValueError):
    """An aggregation window [k_a, k_b] does not fit the sample series."""


class ParseError(AsqpError, ValueError):
    """A QP document could not be parsed.

    Carries the 1-based line and column of the offending token when known.
    """

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class SolverFailure(AsqpError, RuntimeError):
    """A closed-loop run hit a non-optimal solver status and halted.

    Attributes
    ----------
    step : index of the failing sample.
    status : the solver status that caused the halt.
    """

    def __init__(self, message, step, status):
        super().__init__(message)
        self.step = step
        self.status = status


class OracleInconsistency(AsqpError, RuntimeError):
    """A reference solver failed to certify its own answer; test setup bug."""
