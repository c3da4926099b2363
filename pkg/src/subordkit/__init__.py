"""Differential-subordination toolkit: weighted means of analytic maps,
target domains, subordination checks, admissibility scans, Janowski
inequality systems and threshold oracles."""

from . import admiss, apps, domains, fncat, janowski, means, subord, thresholds
from .errors import (BranchCutError, ConfigError, DegenerateParameters, EvaluationError,
                     NonRemovableSingularity, NotConvexError, OutsideDiskError,
                     ParameterError, PoleError, SubordkitError)

__version__ = "0.1.0"

__all__ = ["admiss", "apps", "domains", "fncat", "janowski", "means", "subord", "thresholds",
           "BranchCutError", "ConfigError", "DegenerateParameters", "EvaluationError",
           "NonRemovableSingularity", "NotConvexError", "OutsideDiskError", "ParameterError",
           "PoleError", "SubordkitError"]
