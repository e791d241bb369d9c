"""
Regeneration instants of the modulating chain and their gap moments
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from ..errors import InsufficientDataError
from .drift import Z95

MIN_VISITS = 30


@dataclass
class RegenerationLog:
    anchor: int
    instants: np.ndarray = field(repr=False)
    mean_gap: float = 0.0
    second_moment: float = 0.0
    variance: float = 0.0
    ci95: List[float] = field(default_factory=list)

    @property
    def visits(self) -> int:
        return int(self.instants.size)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "anchor": self.anchor,
            "visits": self.visits,
            "mean_gap": self.mean_gap,
            "second_moment": self.second_moment,
            "variance": self.variance,
            "ci95": self.ci95,
        }


def regeneration_moments(states: np.ndarray, anchor: int, min_visits: int = MIN_VISITS) -> RegenerationLog:
    """
    Instants t_k with S_t = anchor and the moments of the gaps z_k = t_{k+1} - t_k

    Raises:
        InsufficientDataError: anchor visited fewer than `min_visits` times
    """
    states = np.asarray(states)
    instants = np.flatnonzero(states == anchor)
    if instants.size == 0:
        raise InsufficientDataError(f"anchor state {anchor} never visited")
    if instants.size < min_visits:
        raise InsufficientDataError(
            f"anchor state {anchor} visited {instants.size} times, need {min_visits}"
        )
    gaps = np.diff(instants).astype(float)
    mean = float(gaps.mean())
    var = float(gaps.var(ddof=1)) if gaps.size > 1 else 0.0
    half = Z95 * np.sqrt(var / gaps.size)
    return RegenerationLog(
        anchor=int(anchor),
        instants=instants,
        mean_gap=mean,
        second_moment=float((gaps ** 2).mean()),
        variance=var,
        ci95=[mean - half, mean + half],
    )
