"""
Finite discrete-time Markov chains modulating arrivals and constraints
"""
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np

from ..errors import ConfigError, ReducibleChainError

ROW_SUM_TOLERANCE = 1e-12
RESIDUAL_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class FiniteMarkovChain:
    transition: np.ndarray
    initial: int = 0

    def __post_init__(self):
        p = np.asarray(self.transition, dtype=float)
        object.__setattr__(self, "transition", p)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] == 0:
            raise ConfigError(f"transition matrix must be square and non-empty, got {p.shape}")
        if np.any(p < 0):
            raise ConfigError("transition matrix has negative entries")
        sums = p.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > ROW_SUM_TOLERANCE):
            raise ConfigError(f"transition rows must sum to 1, got {sums.tolist()}")
        if not 0 <= self.initial < p.shape[0]:
            raise ConfigError(f"initial state {self.initial} out of range")
        if not is_irreducible(p):
            raise ReducibleChainError("modulating chain is not irreducible")

    @classmethod
    def constant(cls) -> "FiniteMarkovChain":
        return cls(np.ones((1, 1)), 0)

    @classmethod
    def from_dict(cls, spec: dict) -> "FiniteMarkovChain":
        return cls(np.asarray(spec.get("transition", [[1.0]]), dtype=float), int(spec.get("initial", 0)))

    @property
    def n_states(self) -> int:
        return int(self.transition.shape[0])

    @cached_property
    def cumulative(self) -> np.ndarray:
        c = np.cumsum(self.transition, axis=1)
        c[:, -1] = 1.0
        return c

    def step(self, state: int, u: float) -> int:
        """Next state given the current one and a uniform draw in [0, 1)"""
        if self.n_states == 1:
            return 0
        return int(np.searchsorted(self.cumulative[state], u, side="right"))

    def to_dict(self) -> dict:
        return {"transition": self.transition.tolist(), "initial": self.initial}


def is_irreducible(p: np.ndarray) -> bool:
    n = p.shape[0]
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from(zip(*np.nonzero(p > 0)))
    return nx.is_strongly_connected(graph)


def steady_state(c: FiniteMarkovChain) -> np.ndarray:
    """
    Stationary distribution pi with pi P = pi, sum(pi) = 1

    Solves the balance equations with one row replaced by the normalization.

    Raises:
        ReducibleChainError: the balance system is singular or the residual is too large
    """
    p = c.transition
    n = p.shape[0]
    if not is_irreducible(p):
        raise ReducibleChainError("steady state requires an irreducible chain")
    a = p.T - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as e:
        raise ReducibleChainError(f"balance equations are singular: {e}") from e
    residual = np.max(np.abs(pi @ p - pi))
    if residual >= RESIDUAL_TOLERANCE:
        raise ReducibleChainError(f"steady state residual {residual:.3g} too large")
    return pi


def joint_index(s_a: int, s_d: int, n_d: int) -> int:
    return s_a * n_d + s_d
