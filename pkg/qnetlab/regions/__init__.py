"""
Departure regions, feasibility truncation and region presets
"""
from .region import (
    DepartureRegion,
    Candidate,
    truncate,
    feasible_candidates,
    conflict_matrix,
)
from .presets import (
    REGION_PRESETS,
    ContentionGraph,
    switch_region,
    switch_vertex_count,
    independent_set_region,
    build_region,
)

__all__ = [
    "DepartureRegion",
    "Candidate",
    "truncate",
    "feasible_candidates",
    "conflict_matrix",
    "REGION_PRESETS",
    "ContentionGraph",
    "switch_region",
    "switch_vertex_count",
    "independent_set_region",
    "build_region",
]
