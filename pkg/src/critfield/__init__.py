"""Gap sums of compact null sets and critical values of planar distance functions."""

__version__ = "0.1.0"

from .errors import CritfieldError, EmptySetError, ResolutionError
from .realsets import CompactRealSet, gap_sum, is_bt, minkowski_profile, parallel_measure
from .distfield import PlanarCompactSet, critical_values, distance, is_critical, scan_critical
from .construct import build_ferry_set

__all__ = [
    "CritfieldError",
    "EmptySetError",
    "ResolutionError",
    "CompactRealSet",
    "gap_sum",
    "is_bt",
    "minkowski_profile",
    "parallel_measure",
    "PlanarCompactSet",
    "critical_values",
    "distance",
    "is_critical",
    "scan_critical",
    "build_ferry_set",
]
