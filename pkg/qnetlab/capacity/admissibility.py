"""
Capacity-region admissibility: largest epsilon with W(1+epsilon) in sum_S pi_S D(S)
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Sequence, Union

import numpy as np

from ..errors import ConfigError
from ..model.chains import steady_state
from ..model.processes import ConstraintProcess
from ..model.topology import NetworkTopology, workload
from ..regions.region import DepartureRegion
from .simplex import TwoPhaseSimplex

logger = logging.getLogger(__name__)

BOUNDARY_TOLERANCE = 1e-9

STRICT = "strictly-admissible"
BOUNDARY = "boundary"
INADMISSIBLE = "inadmissible"


@dataclass
class AdmissibilityResult:
    margin: float
    verdict: str
    workload: np.ndarray
    pi: np.ndarray
    witness: List[np.ndarray] = field(default_factory=list)
    regions: List[DepartureRegion] = field(default_factory=list)
    unbounded: bool = False
    dominance: bool = False

    @property
    def admissible(self) -> bool:
        return self.verdict != INADMISSIBLE

    def reconstruct(self) -> np.ndarray:
        """sum_S pi_S sum_v w_{S,v} v"""
        total = np.zeros(self.workload.shape[0])
        for p, w, r in zip(self.pi, self.witness, self.regions):
            total += p * (w @ r.vertices)
        return total

    def to_dict(self) -> Dict[str, Any]:
        return {
            "margin": None if math.isinf(self.margin) else self.margin,
            "verdict": self.verdict,
            "unbounded": self.unbounded,
            "dominance": self.dominance,
            "workload": self.workload.tolist(),
            "pi": self.pi.tolist(),
            "witness": [
                {
                    "region": r.label,
                    "weights": {
                        str(vid): float(w[vid]) for vid in np.flatnonzero(w > 1e-12)
                    },
                }
                for w, r in zip(self.witness, self.regions)
            ],
        }


def _verdict(margin: float) -> str:
    if margin > BOUNDARY_TOLERANCE:
        return STRICT
    if margin >= -BOUNDARY_TOLERANCE:
        return BOUNDARY
    return INADMISSIBLE


def regions_by_state(
    c: ConstraintProcess,
    regions: Union[Mapping[str, DepartureRegion], Sequence[DepartureRegion]],
) -> List[DepartureRegion]:
    if isinstance(regions, Mapping):
        missing = [label for label in c.region_of_state if label not in regions]
        if missing:
            raise ConfigError(f"constraint states reference undeclared regions {missing}")
        return [regions[label] for label in c.region_of_state]
    out = list(regions)
    if len(out) != c.n_states:
        raise ConfigError(f"{len(out)} regions for {c.n_states} constraint states")
    return out


def check_admissible(
    lam: Sequence[float],
    t: NetworkTopology,
    c: ConstraintProcess,
    regions: Union[Mapping[str, DepartureRegion], Sequence[DepartureRegion]],
    dominance: bool = False,
) -> AdmissibilityResult:
    """
    Solve max epsilon s.t. sum_S pi_S sum_v w_{S,v} v = W(1+epsilon), w >= 0,
    sum_v w_{S,v} = 1 for every constraint state S

    Variables are e = 1 + epsilon >= 0 followed by the per-state weights.

    Args:
        lam: mean arrival rate vector
        dominance: use >= on the workload rows (valid for regions closed
            under componentwise decrease)
    """
    per_state = regions_by_state(c, regions)
    w = workload(lam, t)
    pi = steady_state(c.chain)
    m = t.m_virtual
    for r in per_state:
        if r.m != m:
            raise ConfigError(f"region '{r.label}' has dimension {r.m}, topology has {m} queues")

    if not np.any(w > 0):
        witness = [np.eye(len(r))[r.zero_id] for r in per_state]
        return AdmissibilityResult(math.inf, STRICT, w, pi, witness, per_state, unbounded=True, dominance=dominance)

    sizes = [len(r) for r in per_state]
    n = 1 + sum(sizes)
    work = np.zeros((m, n))
    work[:, 0] = -w
    conv = np.zeros((len(per_state), n))
    col = 1
    for s, (p, r) in enumerate(zip(pi, per_state)):
        work[:, col:col + len(r)] = p * r.vertices.T
        conv[s, col:col + len(r)] = 1.0
        col += len(r)

    cost = np.zeros(n)
    cost[0] = 1.0
    solver = TwoPhaseSimplex()
    if dominance:
        res = solver.solve(cost, conv, np.ones(len(per_state)), work, np.zeros(m))
    else:
        res = solver.solve(cost, np.vstack([work, conv]), np.concatenate([np.zeros(m), np.ones(len(per_state))]))

    if res.status == "unbounded":
        witness = [np.eye(len(r))[r.zero_id] for r in per_state]
        return AdmissibilityResult(math.inf, STRICT, w, pi, witness, per_state, unbounded=True, dominance=dominance)
    if not res.optimal:
        logger.info("admissibility LP %s; reporting margin -1", res.status)
        return AdmissibilityResult(-1.0, INADMISSIBLE, w, pi, [], per_state, dominance=dominance)

    margin = float(res.x[0]) - 1.0
    witness = []
    col = 1
    for size in sizes:
        weights = res.x[col:col + size].copy()
        total = weights.sum()
        witness.append(weights / total if total > 0 else weights)
        col += size
    return AdmissibilityResult(margin, _verdict(margin), w, pi, witness, per_state, dominance=dominance)
