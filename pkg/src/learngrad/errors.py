"""Exception types raised across the package."""


class LearnGradError(Exception):
    """Base class for every error this package raises on purpose."""


class ShapeMismatchError(LearnGradError, ValueError):
    pass


class EmptyBatchError(LearnGradError, ValueError):
    pass


class IncompatibleSpecsError(LearnGradError, ValueError):
    pass


class DimensionMismatchError(LearnGradError, ValueError):
    pass


class UnsupportedHeadError(LearnGradError, ValueError):
    pass


class TraceMismatchError(LearnGradError, ValueError):
    pass


class DegenerateGradientError(LearnGradError, ValueError):
    """Every input gradient component is exactly zero, so there is nothing to normalize."""


class LengthMismatchError(LearnGradError, ValueError):
    pass


class NonMonotonicEpochError(LearnGradError, ValueError):
    pass


class EmptyFileError(LearnGradError, ValueError):
    pass


class MissingTargetError(LearnGradError, ValueError):
    pass


class ParseError(LearnGradError, ValueError):
    """A CSV cell could not be parsed.

    ``row`` is the 1-based data row (header excluded), ``line`` the 1-based
    line in the file and ``column`` the header name of the offending cell.
    """

    def __init__(self, message, row=None, line=None, column=None):
        self.row = row
        self.line = line
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ZeroVarianceError(LearnGradError, ValueError):
    def __init__(self, feature):
        self.feature = feature
        super().__init__(f"feature {feature!r} has zero variance")


class DegenerateSplitError(LearnGradError, ValueError):
    pass


class EmptyDatasetError(LearnGradError, ValueError):
    pass


class NonFiniteLossError(LearnGradError, ArithmeticError):
    """Training diverged. ``report`` holds the partial run, flagged invalid."""

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)
