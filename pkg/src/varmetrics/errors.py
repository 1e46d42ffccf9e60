"""
Error hierarchy

Every failure the library reports on purpose derives from VarmetricsError;
the CLI maps all of them to exit status 1.
"""


class VarmetricsError(Exception):
    """Base class for domain errors raised by varmetrics"""


class InvalidParameterError(VarmetricsError, ValueError):
    """A distribution or configuration parameter is outside its valid range"""


class LevelDomainError(VarmetricsError, ValueError):
    """A probability level is outside the domain of the requested measure"""


class InfiniteMeanError(VarmetricsError):
    """The operation needs a finite mean but the distribution has none"""


class AssumptionError(VarmetricsError):
    """The distribution does not have a positive density on an interval support"""


class DivergentIntegralError(VarmetricsError):
    """An asymptotic variance integral diverges for this distribution"""


class CalibrationRangeError(VarmetricsError):
    """The calibration target cannot be reached by the other measure"""


class DataFormatError(VarmetricsError):
    """An input CSV file is malformed or violates the series invariants"""


class SpecParseError(VarmetricsError, ValueError):
    """A distribution spec string does not match the grammar"""
