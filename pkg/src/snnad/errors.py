"""Exception hierarchy.

Three broad families map onto CLI exit codes: configuration problems (exit 2),
data problems (exit 3), and everything else (exit 4).
"""


class SnnAdError(Exception):
    """Base class for all package errors."""


class ConfigError(SnnAdError):
    """Invalid or unparseable run configuration."""


class DataError(SnnAdError):
    """Problem with input data files or their contents."""


class MalformedRow(DataError):
    def __init__(self, row, reason):
        self.row = row
        self.reason = reason
        super().__init__(f"row {row}: {reason}")


class DuplicateTimestamp(DataError):
    pass


class EmptySeries(DataError):
    pass


class MalformedWindow(DataError):
    pass


class IrreconcilableGrid(DataError):
    pass


class GapTooLarge(DataError):
    pass


class SeriesTooShort(DataError):
    pass


class AnomalyInTrainingData(DataError):
    pass


class DegenerateDomain(SnnAdError):
    pass


class BadFraction(SnnAdError):
    pass


class NeuronCapExceeded(SnnAdError):
    pass


class DimensionMismatch(SnnAdError):
    pass


class MissingRecurrentParams(SnnAdError):
    pass


class LengthMismatch(SnnAdError):
    pass


class SingleClass(SnnAdError):
    """Labels contain only one class; ROC-based metrics are undefined."""


class EmptySignal(SnnAdError):
    pass


class BadWindow(SnnAdError):
    pass


class CheckpointError(SnnAdError):
    pass
