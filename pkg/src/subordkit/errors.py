"""Exception hierarchy shared by every module."""


class SubordkitError(Exception):
    pass


class EvaluationError(SubordkitError, ValueError):
    """An analytic map could not be evaluated at the requested point."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class BranchCutError(EvaluationError):
    pass


class PoleError(EvaluationError):
    pass


class OutsideDiskError(EvaluationError):
    pass


class NonRemovableSingularity(EvaluationError):
    pass


class ParameterError(SubordkitError, ValueError):
    """Parameters outside the admissible range of a catalog entry or theorem."""


class DegenerateParameters(ParameterError):
    pass


class NotConvexError(SubordkitError, ValueError):
    pass


class ConfigError(SubordkitError, ValueError):
    pass
