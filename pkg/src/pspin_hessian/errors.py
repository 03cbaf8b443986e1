"""Exception types raised across the package."""


class PSpinError(Exception):
    """Base class for all package errors."""


class InvalidSpec(PSpinError, ValueError):
    pass


class DegenerateSigma(PSpinError):
    """The (h, d_r h) covariance is singular: a pure model was passed to mixed-only machinery."""


class RootNotBracketed(PSpinError):
    pass


class NotPureLike(PSpinError):
    pass


class NoSignChange(PSpinError):
    pass


class NoAlphaFound(PSpinError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class MemoryCapExceeded(PSpinError):
    def __init__(self, degree, entries, cap):
        super().__init__(
            f"degree {degree} needs {entries} entries, above the cap of {cap}"
        )
        self.degree = degree
        self.entries = entries
        self.cap = cap


class DimensionMismatch(PSpinError, ValueError):
    pass


class MaxItersExceeded(PSpinError):
    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class NoConvergedRun(PSpinError):
    def __init__(self, message, records=None):
        super().__init__(message)
        self.records = records or []


class NotConverged(PSpinError):
    pass


class EmptyRegion(PSpinError):
    pass


class ConfigInvalid(PSpinError, ValueError):
    def __init__(self, errors):
        if isinstance(errors, str):
            errors = {"config": errors}
        self.errors = dict(errors)
        detail = "; ".join(f"{k}: {v}" for k, v in self.errors.items())
        super().__init__(f"invalid run config: {detail}")
