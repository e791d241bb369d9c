"""
Markov-modulated arrival and constraint processes
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np

from ..errors import ConfigError
from .chains import FiniteMarkovChain, steady_state

PROB_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class BatchDistribution:
    """Finite-support law of the batch arriving at one queue in one slot"""
    values: Tuple[int, ...]
    probs: Tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.probs) or not self.values:
            raise ConfigError("batch distribution needs matching non-empty values/probs")
        if any(v < 0 for v in self.values):
            raise ConfigError(f"batch values must be non-negative, got {self.values}")
        if len(set(self.values)) != len(self.values):
            raise ConfigError(f"batch values must be distinct, got {self.values}")
        if any(p < -PROB_TOLERANCE for p in self.probs):
            raise ConfigError(f"batch probabilities must be non-negative, got {self.probs}")
        if abs(sum(self.probs) - 1.0) > PROB_TOLERANCE:
            raise ConfigError(f"batch probabilities must sum to 1, got {sum(self.probs)}")

    @classmethod
    def bernoulli(cls, rate: float) -> "BatchDistribution":
        if not 0.0 <= rate <= 1.0:
            raise ConfigError(f"Bernoulli rate must lie in [0, 1], got {rate}")
        return cls((0, 1), (1.0 - rate, rate))

    @classmethod
    def from_dict(cls, spec: dict) -> "BatchDistribution":
        return cls(
            tuple(int(v) for v in spec["values"]),
            tuple(float(p) for p in spec["probs"]),
        )

    @property
    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    @property
    def c_max(self) -> int:
        return max(v for v, p in zip(self.values, self.probs) if p > 0) if any(self.probs) else 0

    def scaled(self, rho: float) -> "BatchDistribution":
        """Rescale the mean by rho by moving mass between 0 and the positive support"""
        if rho < 0:
            raise ConfigError(f"scale factor must be non-negative, got {rho}")
        positive = [(v, p) for v, p in zip(self.values, self.probs) if v > 0]
        mass = sum(p for _, p in positive)
        if rho * mass > 1.0 + PROB_TOLERANCE:
            raise ConfigError(
                f"cannot scale batch law by {rho}: positive mass {mass:.4g} would exceed 1"
            )
        values = [0] + [v for v, _ in positive]
        probs = [max(0.0, 1.0 - rho * mass)] + [rho * p for _, p in positive]
        return BatchDistribution(tuple(values), tuple(probs))

    def to_dict(self) -> dict:
        return {"values": list(self.values), "probs": list(self.probs)}


@dataclass(frozen=True, eq=False)
class ArrivalProcess:
    chain: FiniteMarkovChain
    per_state_dist: Tuple[Tuple[BatchDistribution, ...], ...]

    def __post_init__(self):
        if len(self.per_state_dist) != self.chain.n_states:
            raise ConfigError(
                f"{len(self.per_state_dist)} arrival laws declared for "
                f"{self.chain.n_states} modulating states"
            )
        widths = {len(row) for row in self.per_state_dist}
        if len(widths) != 1:
            raise ConfigError("every arrival state must cover the same number of queues")

    @classmethod
    def bernoulli(cls, rates: Sequence[float], chain: FiniteMarkovChain = None) -> "ArrivalProcess":
        """i.i.d. Bernoulli arrivals (1-state chain) with the given per-queue rates"""
        dists = tuple(BatchDistribution.bernoulli(float(r)) for r in rates)
        return cls(chain or FiniteMarkovChain.constant(), (dists,))

    @classmethod
    def from_dict(cls, spec: dict) -> "ArrivalProcess":
        chain = FiniteMarkovChain.from_dict(spec.get("chain", {}))
        states = []
        for entry in spec.get("states", []):
            if "rates" in entry:
                states.append(tuple(BatchDistribution.bernoulli(float(r)) for r in entry["rates"]))
            elif "batches" in entry:
                states.append(tuple(BatchDistribution.from_dict(b) for b in entry["batches"]))
            else:
                raise ConfigError("arrival state needs 'rates' or 'batches'")
        return cls(chain, tuple(states))

    @property
    def m(self) -> int:
        return len(self.per_state_dist[0])

    @property
    def c_max(self) -> int:
        return max(d.c_max for row in self.per_state_dist for d in row)

    def state_rates(self, state: int) -> np.ndarray:
        return np.array([d.mean for d in self.per_state_dist[state]])

    def scaled(self, rho: float) -> "ArrivalProcess":
        return ArrivalProcess(
            self.chain,
            tuple(tuple(d.scaled(rho) for d in row) for row in self.per_state_dist),
        )

    @cached_property
    def tables(self) -> Tuple[np.ndarray, np.ndarray]:
        """Padded per-state cumulative probabilities and values, shape (S, M, K)"""
        k = max(len(d.values) for row in self.per_state_dist for d in row)
        s, m = self.chain.n_states, self.m
        cum = np.ones((s, m, k))
        vals = np.zeros((s, m, k), dtype=np.int64)
        for i, row in enumerate(self.per_state_dist):
            for j, d in enumerate(row):
                c = np.cumsum(d.probs)
                c[-1] = 1.0
                cum[i, j, : len(c)] = c
                vals[i, j, : len(d.values)] = d.values
                vals[i, j, len(d.values):] = d.values[-1]
        return cum, vals

    def draw_block(self, states: np.ndarray, u: np.ndarray) -> np.ndarray:
        """
        Arrival vectors for a run of slots by inverse-CDF lookup

        Args:
            states: modulating state of each slot, shape (N,)
            u: uniforms, shape (N, M)
        """
        cum, vals = self.tables
        states = np.asarray(states, dtype=np.intp)
        idx = (u[:, :, None] >= cum[states]).sum(axis=2)
        return vals[states[:, None], np.arange(self.m)[None, :], idx]

    def draw(self, state: int, u: np.ndarray) -> np.ndarray:
        """Arrival vector for one slot from a vector of M uniforms"""
        return self.draw_block(np.array([state]), np.asarray(u)[None, :])[0]

    def to_dict(self) -> dict:
        return {
            "chain": self.chain.to_dict(),
            "states": [{"batches": [d.to_dict() for d in row]} for row in self.per_state_dist],
        }


@dataclass(frozen=True, eq=False)
class ConstraintProcess:
    chain: FiniteMarkovChain
    region_of_state: Tuple[str, ...]

    def __post_init__(self):
        if len(self.region_of_state) != self.chain.n_states:
            raise ConfigError(
                f"{len(self.region_of_state)} regions mapped for "
                f"{self.chain.n_states} constraint states"
            )

    @classmethod
    def static(cls, region: str) -> "ConstraintProcess":
        return cls(FiniteMarkovChain.constant(), (region,))

    @property
    def n_states(self) -> int:
        return self.chain.n_states


def sample_arrivals(p: ArrivalProcess, state: int, rng: np.random.Generator) -> np.ndarray:
    """One arrival vector drawn from the batch laws of the given modulating state"""
    if not 0 <= state < p.chain.n_states:
        raise ConfigError(f"arrival state {state} out of range")
    return p.draw(state, rng.random(p.m))


def mean_rate(p: ArrivalProcess) -> np.ndarray:
    """Lambda = sum_S pi_S Lambda(S)"""
    pi = steady_state(p.chain)
    rates = np.array([p.state_rates(s) for s in range(p.chain.n_states)])
    return pi @ rates
