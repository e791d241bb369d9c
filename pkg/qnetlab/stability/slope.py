"""
Growth-slope classification of ||X_t||_1
"""
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from ..errors import InsufficientDataError

MIN_POINTS = 100

STABLE = "stable"
UNSTABLE = "unstable"
INCONCLUSIVE = "inconclusive"


@dataclass
class SlopeConfig:
    windows: int = 50
    stable: float = 1e-3
    unstable: float = 1e-2

    @classmethod
    def from_dict(cls, spec: Optional[Dict[str, Any]]) -> "SlopeConfig":
        spec = spec or {}
        return cls(
            int(spec.get("windows", cls.windows)),
            float(spec.get("stable", cls.stable)),
            float(spec.get("unstable", cls.unstable)),
        )


@dataclass
class SlopeResult:
    slope: float
    classification: str
    windows: int

    def to_dict(self) -> Dict[str, Any]:
        return {"slope": self.slope, "classification": self.classification, "windows": self.windows}


def slope_test(series: np.ndarray, cfg: Optional[SlopeConfig] = None,
               times: Optional[np.ndarray] = None) -> SlopeResult:
    """
    Least-squares slope of windowed means over the second half of the run

    Args:
        series: recorded ||X_t||_1 values
        times: slot of every recorded value (default 0, 1, 2, ...)

    Raises:
        InsufficientDataError: fewer than 100 recorded points
    """
    cfg = cfg or SlopeConfig()
    y = np.asarray(series, dtype=float)
    if y.size < MIN_POINTS:
        raise InsufficientDataError(f"slope test needs >= {MIN_POINTS} points, got {y.size}")
    t = np.arange(y.size, dtype=float) if times is None else np.asarray(times, dtype=float)
    half = y.size // 2
    y, t = y[half:], t[half:]
    n_windows = max(2, min(cfg.windows, y.size))
    y_means = np.array([w.mean() for w in np.array_split(y, n_windows)])
    t_means = np.array([w.mean() for w in np.array_split(t, n_windows)])
    slope = float(np.polyfit(t_means, y_means, 1)[0])
    if abs(slope) < cfg.stable:
        verdict = STABLE
    elif slope > cfg.unstable:
        verdict = UNSTABLE
    else:
        verdict = INCONCLUSIVE
    return SlopeResult(slope, verdict, n_windows)
