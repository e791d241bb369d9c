"""
Trajectory recorder, moment accumulators and moment boundedness reports
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..errors import ConfigError

DEFAULT_MOMENTS = 4
BOUNDED_RATIO = (0.8, 1.25)


@dataclass
class MomentAccumulator:
    """Running sums of ||X||_2^h for h = 1..H; merging is an associative reduce"""
    moments: int = DEFAULT_MOMENTS
    count: int = 0
    sums: np.ndarray = None

    def __post_init__(self):
        if self.sums is None:
            self.sums = np.zeros(self.moments)

    def update(self, l2: np.ndarray):
        l2 = np.asarray(l2, dtype=float).ravel()
        if l2.size == 0:
            return
        powers = l2[:, None] ** np.arange(1, self.moments + 1)[None, :]
        self.sums = self.sums + powers.sum(axis=0)
        self.count += int(l2.size)

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        if other.moments != self.moments:
            raise ConfigError("cannot merge accumulators with different moment orders")
        return MomentAccumulator(self.moments, self.count + other.count, self.sums + other.sums)

    def means(self) -> np.ndarray:
        if self.count == 0:
            return np.zeros(self.moments)
        return self.sums / self.count


@dataclass
class StatsRecorder:
    """
    Recorded series (t, ||X||_1, ||X||_2, x) every `sample_every` slots

    Slots before `warmup` stay in the series but are kept out of the moment
    accumulator.
    """
    sample_every: int = 1
    moments: int = DEFAULT_MOMENTS
    warmup: int = 0
    acc: MomentAccumulator = None
    _times: List[np.ndarray] = field(default_factory=list, repr=False)
    _states: List[np.ndarray] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if self.sample_every < 1:
            raise ConfigError(f"sample_every must be >= 1, got {self.sample_every}")
        if self.moments < 1:
            raise ConfigError(f"moment order must be >= 1, got {self.moments}")
        if self.acc is None:
            self.acc = MomentAccumulator(self.moments)

    def record(self, t: int, x: np.ndarray):
        """Record one slot (ignored unless t falls on the stride)"""
        if t % self.sample_every:
            return
        self.record_batch(np.array([t]), np.asarray(x)[None, :])

    def record_batch(self, ts: np.ndarray, xs: np.ndarray):
        """Record a block of slots; only those on the stride are kept"""
        keep = np.asarray(ts) % self.sample_every == 0
        ts = np.asarray(ts)[keep]
        xs = np.asarray(xs)[keep]
        if ts.size == 0:
            return
        self._times.append(ts.astype(np.int64))
        self._states.append(xs)
        post = ts >= self.warmup
        self.acc.update(np.linalg.norm(xs[post].astype(float), axis=1))

    @classmethod
    def from_trajectory(cls, states: np.ndarray, sample_every: int = 1,
                        moments: int = DEFAULT_MOMENTS, warmup: int = 0) -> "StatsRecorder":
        rec = cls(sample_every, moments, warmup)
        rec.record_batch(np.arange(states.shape[0]), states)
        return rec

    @property
    def times(self) -> np.ndarray:
        return np.concatenate(self._times) if self._times else np.zeros(0, dtype=np.int64)

    @property
    def states(self) -> np.ndarray:
        return np.concatenate(self._states) if self._states else np.zeros((0, 0), dtype=np.int64)

    @property
    def l1(self) -> np.ndarray:
        s = self.states
        return s.sum(axis=1).astype(float) if s.size else np.zeros(0)

    @property
    def l2(self) -> np.ndarray:
        s = self.states
        return np.linalg.norm(s.astype(float), axis=1) if s.size else np.zeros(0)

    def merge(self, other: "StatsRecorder") -> "StatsRecorder":
        """Accumulator reduce; series are per replication and are not concatenated"""
        return StatsRecorder(self.sample_every, self.moments, self.warmup, self.acc.merge(other.acc))


@dataclass
class MomentReport:
    h: int
    average: float
    ratio: float
    bounded: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"h": self.h, "average": self.average, "ratio": self.ratio, "bounded": self.bounded}


def moment_report(recorder: StatsRecorder, h: int) -> MomentReport:
    """
    Time-averaged ||X||_2^h after warm-up, plus the boundedness ratio

    The ratio divides the running average at the end of the post-warm-up
    window by the running average at its half-way point.

    Raises:
        ConfigError: h outside 1..H
    """
    if not 1 <= h <= recorder.moments:
        raise ConfigError(f"moment order {h} outside 1..{recorder.moments}")
    average = float(recorder.acc.means()[h - 1])
    times = recorder.times
    values = recorder.l2[times >= recorder.warmup] ** h
    ratio = 1.0
    if values.size >= 2:
        half = float(values[: values.size // 2].mean())
        full = float(values.mean())
        if half > 0:
            ratio = full / half
        elif full > 0:
            ratio = float("inf")
    lo, hi = BOUNDED_RATIO
    return MomentReport(h, average, ratio, bool(lo <= ratio <= hi))
