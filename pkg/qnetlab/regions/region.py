"""
Departure regions held as explicit vertex lists
"""
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence

import numpy as np

from ..errors import RegionError


@dataclass(frozen=True, eq=False)
class DepartureRegion:
    """
    Convex departure region represented by its vertices

    The hull is never materialized: every objective the policies maximize is
    linear, so its maximum over the hull is reached at a listed vertex.
    Vertex ids are row positions in `vertices`.
    """
    vertices: np.ndarray
    label: str = "region"
    d_max: Optional[int] = None

    def __post_init__(self):
        v = np.asarray(self.vertices)
        if v.ndim != 2 or v.shape[0] == 0:
            raise RegionError(f"region '{self.label}' needs a non-empty 2-D vertex list")
        if not np.all(np.equal(np.mod(v, 1), 0)):
            raise RegionError(f"region '{self.label}' has non-integer vertices")
        v = v.astype(np.int64)
        if np.any(v < 0):
            raise RegionError(f"region '{self.label}' has negative vertex entries")
        if len({tuple(row) for row in v.tolist()}) != len(v):
            raise RegionError(f"region '{self.label}' lists duplicate vertices")
        if not np.any(np.all(v == 0, axis=1)):
            raise RegionError(f"region '{self.label}' must contain the zero (idle) vector")
        if self.d_max is not None and np.any(v > self.d_max):
            raise RegionError(f"region '{self.label}' exceeds d_max={self.d_max}")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def m(self) -> int:
        return int(self.vertices.shape[1])

    def __len__(self) -> int:
        return int(self.vertices.shape[0])

    @cached_property
    def zero_id(self) -> int:
        return int(np.flatnonzero(np.all(self.vertices == 0, axis=1))[0])

    @cached_property
    def max_departure(self) -> int:
        return int(self.vertices.max())

    def without(self, drop: Sequence[Sequence[int]], label: Optional[str] = None) -> "DepartureRegion":
        """Copy of the region with the listed vertices removed (zero cannot be dropped)"""
        dropped = {tuple(int(x) for x in d) for d in drop}
        if tuple([0] * self.m) in dropped:
            raise RegionError("the zero vector cannot be dropped from a region")
        keep = [row for row in self.vertices.tolist() if tuple(row) not in dropped]
        if len(keep) == len(self):
            raise RegionError(f"none of {sorted(dropped)} is a vertex of '{self.label}'")
        return DepartureRegion(np.array(keep), label or self.label, self.d_max)

    def to_dict(self) -> dict:
        return {"label": self.label, "vertices": self.vertices.tolist()}


@dataclass(frozen=True)
class Candidate:
    vector: np.ndarray
    vertex_id: int


def truncate(d: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Componentwise min(d, x): a feasible departure vector that never exceeds x"""
    return np.minimum(d, x)


def feasible_candidates(r: DepartureRegion, x: np.ndarray) -> List[Candidate]:
    """
    Truncate every vertex by x and deduplicate

    Returns:
        Distinct truncated vectors, each tagged with the lowest vertex id producing it
    """
    seen = {}
    for vid, vec in enumerate(truncate(r.vertices, x)):
        key = tuple(vec.tolist())
        if key not in seen:
            seen[key] = Candidate(vec, vid)
    return list(seen.values())


def conflict_matrix(r: DepartureRegion) -> np.ndarray:
    """
    P[m, m'] = 1 when m = m' or no vertex serves m and m' in the same slot

    For a contention graph this is I + adjacency; for an input-queued switch it
    links VOQs sharing an input or an output port.
    """
    served = (r.vertices > 0).astype(np.int64)
    together = served.T @ served
    p = (together == 0).astype(float)
    np.fill_diagonal(p, 1.0)
    return p
