"""
Capacity-region admissibility checking
"""
from .simplex import TwoPhaseSimplex, SimplexResult
from .admissibility import (
    AdmissibilityResult,
    check_admissible,
    regions_by_state,
    STRICT,
    BOUNDARY,
    INADMISSIBLE,
)

__all__ = [
    "TwoPhaseSimplex",
    "SimplexResult",
    "AdmissibilityResult",
    "check_admissible",
    "regions_by_state",
    "STRICT",
    "BOUNDARY",
    "INADMISSIBLE",
]
