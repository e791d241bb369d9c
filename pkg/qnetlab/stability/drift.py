"""
Lyapunov drift profile binned on ||X||_1
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..errors import InsufficientDataError
from ..potentials.algebra import hessian
from ..potentials.nodes import Potential

Z95 = 1.959963984540054
DEFAULT_BINS = 20
DEFAULT_MIN_COUNT = 30


@dataclass
class DriftBin:
    lo: float
    hi: float
    count: int = 0
    mean: Optional[float] = None
    se: Optional[float] = None
    normalized_count: int = 0
    normalized_mean: Optional[float] = None
    normalized_se: Optional[float] = None
    hessian_norm: Optional[float] = None

    @staticmethod
    def _ci(mean, se):
        if mean is None or se is None:
            return None
        return [mean - Z95 * se, mean + Z95 * se]

    @property
    def ci95(self):
        return self._ci(self.mean, self.se)

    @property
    def normalized_ci95(self):
        return self._ci(self.normalized_mean, self.normalized_se)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "count": self.count,
            "mean": self.mean,
            "se": self.se,
            "ci95": self.ci95,
            "normalized_mean": self.normalized_mean,
            "normalized_se": self.normalized_se,
            "normalized_ci95": self.normalized_ci95,
            "hessian_norm": self.hessian_norm,
        }


@dataclass
class DriftProfile:
    edges: np.ndarray
    bins: List[DriftBin] = field(default_factory=list)
    min_count: int = DEFAULT_MIN_COUNT

    @property
    def empty_bins(self) -> List[int]:
        return [i for i, b in enumerate(self.bins) if b.count == 0]

    def top_bin(self) -> Optional[DriftBin]:
        """Highest bin with at least `min_count` samples"""
        for b in reversed(self.bins):
            if b.count >= self.min_count:
                return b
        return None

    def negative_from(self) -> Optional[int]:
        """Lowest bin index from which every populated bin has negative mean drift"""
        populated = [i for i, b in enumerate(self.bins) if b.count >= self.min_count]
        start = None
        for i in reversed(populated):
            if self.bins[i].mean < 0:
                start = i
            else:
                break
        return start

    def merge(self, other: "DriftProfile") -> "DriftProfile":
        """Pooled per-bin statistics of two profiles built on the same edges"""
        if not np.array_equal(self.edges, other.edges):
            raise ValueError("drift profiles must share bin edges to merge")
        merged = DriftProfile(self.edges, min_count=self.min_count)
        for a, b in zip(self.bins, other.bins):
            count, mean, se = _pool(a.count, a.mean, a.se, b.count, b.mean, b.se)
            ncount, nmean, nse = _pool(
                a.normalized_count, a.normalized_mean, a.normalized_se,
                b.normalized_count, b.normalized_mean, b.normalized_se,
            )
            merged.bins.append(DriftBin(a.lo, a.hi, count, mean, se, ncount, nmean, nse,
                                        a.hessian_norm if a.hessian_norm is not None else b.hessian_norm))
        return merged

    def to_dict(self) -> Dict[str, Any]:
        top = self.top_bin()
        return {
            "edges": [float(e) for e in self.edges],
            "bins": [b.to_dict() for b in self.bins],
            "empty_bins": self.empty_bins,
            "min_count": self.min_count,
            "top_bin": top.to_dict() if top else None,
            "negative_from": self.negative_from(),
        }


def drift_edges(max_l1: float, bins: int = DEFAULT_BINS) -> np.ndarray:
    """Geometric edges from 1 to max ||X||_1 (strictly increasing)"""
    return np.geomspace(1.0, max(float(max_l1), 2.0), bins + 1)


def _pool(n1, m1, se1, n2, m2, se2):
    if n1 == 0:
        return n2, m2, se2
    if n2 == 0:
        return n1, m1, se1
    n = n1 + n2
    mean = (n1 * m1 + n2 * m2) / n
    # sums of squared deviations recovered from the standard errors (ddof=1)
    ss1 = (se1 or 0.0) ** 2 * n1 * (n1 - 1)
    ss2 = (se2 or 0.0) ** 2 * n2 * (n2 - 1)
    ss = ss1 + ss2 + n1 * n2 / n * (m1 - m2) ** 2
    return n, float(mean), float(np.sqrt(ss / (n - 1) / n))


def _mean_se(v: np.ndarray):
    if v.size == 0:
        return None, None
    mean = float(v.mean())
    se = float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else None
    return mean, se


def drift_profile(
    states: np.ndarray,
    potential: Potential,
    bins: int = DEFAULT_BINS,
    normalizer: Optional[Potential] = None,
    edges: Optional[np.ndarray] = None,
    min_count: int = DEFAULT_MIN_COUNT,
    with_hessian: bool = False,
) -> DriftProfile:
    """
    Per-bin mean of dL = L(X_{t+1}) - L(X_t), binned on ||X_t||_1

    Also reports dL / ||grad G(X_t)|| per bin, with G the normalizer
    (defaults to the drift potential). Slots where the gradient vanishes
    are left out of the normalized column.

    Args:
        states: trajectory, shape (T+1, M)
        edges: shared bin edges (default: geometric from 1 to max ||X||_1)

    Raises:
        InsufficientDataError: fewer than 10 transitions per bin
    """
    states = np.asarray(states, dtype=float)
    n = states.shape[0] - 1
    if n < 10 * bins:
        raise InsufficientDataError(f"drift profile needs >= {10 * bins} transitions, got {n}")
    normalizer = normalizer or potential
    l1 = states.sum(axis=1)
    edges = drift_edges(l1.max(), bins) if edges is None else np.asarray(edges, dtype=float)
    bins = len(edges) - 1

    values = np.asarray(potential.value(states), dtype=float)
    delta = values[1:] - values[:-1]
    grad_norm = np.linalg.norm(normalizer.gradient(states[:-1]), axis=1)
    idx = np.clip(np.digitize(np.maximum(l1[:-1], 1.0), edges[1:-1]), 0, bins - 1)

    profile = DriftProfile(edges=edges, min_count=min_count)
    for b in range(bins):
        sel = idx == b
        d = delta[sel]
        mean, se = _mean_se(d)
        g = grad_norm[sel]
        ok = g > 0
        nmean, nse = _mean_se(d[ok] / g[ok])
        entry = DriftBin(
            float(edges[b]), float(edges[b + 1]), int(d.size), mean, se,
            int(ok.sum()), nmean, nse,
        )
        if with_hessian and d.size:
            entry.hessian_norm = float(np.linalg.norm(hessian(potential, states[:-1][sel].mean(axis=0)), 2))
        profile.bins.append(entry)
    return profile
