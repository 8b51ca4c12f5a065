"""Exception hierarchy.

Every error raised by the package derives from :class:`QSpeedError`, itself a
``ValueError`` so callers that only care about bad input can catch that.
Errors describing a measured defect carry the size of the defect in
``violation``.
"""


class QSpeedError(ValueError):
    """Base class for all package errors."""


class _Measured(QSpeedError):
    def __init__(self, message, violation=None):
        super().__init__(message)
        self.violation = violation


class NotHermitian(_Measured):
    pass


class TraceNotOne(_Measured):
    pass


class NotPSD(_Measured):
    pass


class DimensionMismatch(QSpeedError):
    pass


class BadFactorization(DimensionMismatch):
    pass


class WrongDimension(DimensionMismatch):
    pass


class ConvergenceFailure(QSpeedError):
    pass


class NoConvergence(_Measured):
    pass


class DegenerateSpectrum(QSpeedError):
    pass


class OutOfRange(QSpeedError):
    pass


class OutOfBand(OutOfRange):
    pass


class KKTViolation(_Measured):
    pass


class StructureViolation(_Measured):
    def __init__(self, message, violation=None, entries=()):
        super().__init__(message, violation)
        self.entries = list(entries)
