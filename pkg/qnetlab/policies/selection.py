"""
Per-slot departure selection: max-scalar and pick-and-compare memory rules
"""
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from ..errors import UnknownConstraintStateError
from ..model.topology import NetworkTopology
from ..potentials.algebra import pressure
from ..potentials.nodes import Potential
from ..regions.region import DepartureRegion

TIE_TOLERANCE = 1e-12


def tie_tolerance(best: float) -> float:
    return TIE_TOLERANCE * max(1.0, abs(best))


@dataclass
class Selection:
    """Chosen (truncated) departure vector, its vertex id and objective value"""
    vector: np.ndarray
    vertex_id: int
    value: float


@dataclass
class PolicyMemory:
    """
    Memorized vertex id per constraint state plus the stale-view cache

    Single-owner mutable state; one instance per replication.
    """
    last_vector: Dict[int, int] = field(default_factory=dict)
    stale_state: Optional[np.ndarray] = None
    stale_age: int = 0

    @classmethod
    def initial(cls, regions: Sequence[DepartureRegion]) -> "PolicyMemory":
        """Every constraint state starts from its region's zero vertex"""
        return cls({s: r.zero_id for s, r in enumerate(regions)})

    def remembered(self, s_d: int) -> int:
        if s_d not in self.last_vector:
            raise UnknownConstraintStateError(f"constraint state {s_d} has no memory entry")
        return self.last_vector[s_d]


def best_vertex(weights: np.ndarray, x: np.ndarray, r: DepartureRegion) -> Selection:
    """Argmax of <weights . min(v, x)> over the vertices, lowest id on ties"""
    cand = np.minimum(r.vertices, x)
    scores = cand @ weights
    best = float(scores.max())
    vid = int(np.flatnonzero(scores >= best - tie_tolerance(best))[0])
    return Selection(cand[vid], vid, float(scores[vid]))


def select_max_scalar(
    g: Potential,
    x: np.ndarray,
    r: DepartureRegion,
    t: NetworkTopology,
    z: Optional[np.ndarray] = None,
) -> Selection:
    """
    grad-G max-scalar rule

    Args:
        g: potential supplying the weights
        x: true queue state, used for truncation
        r: departure region of the current constraint state
        t: topology (pressure uses (I - R)^T)
        z: state the weights are computed from (defaults to x)
    """
    weights = pressure(g, x if z is None else z, t)
    return best_vertex(weights, x, r)


def _compare(weights, x, r: DepartureRegion, candidate_id: int, memory_id: int) -> Selection:
    cand = np.minimum(r.vertices[candidate_id], x)
    kept = np.minimum(r.vertices[memory_id], x)
    sc = float(cand @ weights)
    sm = float(kept @ weights)
    # the memorized vertex wins ties
    if sc > sm + tie_tolerance(sm):
        return Selection(cand, candidate_id, sc)
    return Selection(kept, memory_id, sm)


def select_with_memory(
    g: Potential,
    x: np.ndarray,
    r: DepartureRegion,
    t: NetworkTopology,
    mem: PolicyMemory,
    rng: np.random.Generator,
    z: Optional[np.ndarray] = None,
) -> Selection:
    """
    Pick-and-compare under static constraints

    Draws one vertex uniformly, keeps whichever of it and the memorized vertex
    (both truncated by x) scores higher, and memorizes the winner.
    """
    weights = pressure(g, x if z is None else z, t)
    candidate_id = int(rng.integers(len(r)))
    sel = _compare(weights, x, r, candidate_id, mem.remembered(0))
    mem.last_vector[0] = sel.vertex_id
    return sel


def select_memory_dynamic(
    g: Potential,
    x: np.ndarray,
    r: DepartureRegion,
    t: NetworkTopology,
    mem: PolicyMemory,
    s_d: int,
    rng: np.random.Generator,
    z: Optional[np.ndarray] = None,
) -> Selection:
    """
    Pick-and-compare against the vertex memorized for constraint state s_d

    Raises:
        UnknownConstraintStateError: s_d has no memory entry
    """
    memory_id = mem.remembered(s_d)
    weights = pressure(g, x if z is None else z, t)
    candidate_id = int(rng.integers(len(r)))
    sel = _compare(weights, x, r, candidate_id, memory_id)
    mem.last_vector[s_d] = sel.vertex_id
    return sel
