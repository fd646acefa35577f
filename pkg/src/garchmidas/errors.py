"""Exception and warning classes raised by garchmidas."""


class GarchMidasError(Exception):
    """Base class for all package errors."""


class DataError(GarchMidasError, ValueError):
    """Input data violates a series or panel invariant."""


class MalformedRow(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateDate(DataError):
    pass


class NonPositivePrice(DataError):
    pass


class WrongKind(DataError):
    pass


class EmptyPeriod(DataError):
    pass


class RegressorGap(DataError):
    pass


class InsufficientLagHistory(DataError):
    def __init__(self, message, first_usable=None):
        self.first_usable = first_usable
        super().__init__(message)


class TooFewObservations(GarchMidasError, ValueError):
    pass


class SingularRegression(GarchMidasError, ValueError):
    pass


class InvalidShape(GarchMidasError, ValueError):
    pass


class InfeasibleParams(GarchMidasError, ValueError):
    """Parameter point outside the admissible region (e.g. a non-positive tau)."""


class NonPositiveTau(InfeasibleParams):
    def __init__(self, message, periods=()):
        self.periods = tuple(periods)
        super().__init__(message)


class NoFeasibleStart(InfeasibleParams):
    pass


class NonConvergence(GarchMidasError, RuntimeError):
    pass


class SingularHessian(GarchMidasError, ValueError):
    pass


class RangeBeforeFitWindow(GarchMidasError, ValueError):
    pass


class EmptySeries(GarchMidasError, ValueError):
    pass


class DegeneratePanel(GarchMidasError, ValueError):
    pass


class ConvergenceFailure(GarchMidasError, RuntimeError):
    pass


class SkewUndefinedWarning(RuntimeWarning):
    """Skewness and kurtosis are undefined for a zero-variance sample."""
