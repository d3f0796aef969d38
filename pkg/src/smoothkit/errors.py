"""Exception hierarchy shared by all smoothkit modules."""


class SmoothkitError(Exception):
    """Base class for every error raised by smoothkit."""


class UsageError(SmoothkitError):
    """Invalid arguments or inconsistent inputs supplied by the caller."""


class DataError(SmoothkitError, ValueError):
    """Input data violates a Dataset or file-format contract."""


class ColumnError(DataError):
    """A named column is missing from the input."""


class ParseError(DataError):
    """A cell could not be parsed as a number."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class SizeError(DataError):
    """Too few observations for the requested fit."""


class DomainError(SmoothkitError, ValueError):
    """A scalar argument is outside its mathematical domain."""


class RankError(SmoothkitError):
    """Normal equations are singular to working precision."""


class NeighborhoodError(SmoothkitError):
    """A local fit has too few points carrying positive kernel weight."""


class DegeneracyError(SmoothkitError):
    """Smoother leaves no error degrees of freedom (df_err <= 0)."""


class SelectionError(SmoothkitError):
    """No candidate smoothing parameter produced a finite score."""


class KnotError(SmoothkitError):
    """Spline knots are invalid or collapse onto each other."""


class ExtrapolationError(SmoothkitError):
    """Prediction requested outside the fitted range."""


class OptimizationError(SmoothkitError):
    """Optimizer could not produce a finite objective from any start."""


class DegenerateScaleError(SmoothkitError):
    """Residual scale estimate is zero."""
