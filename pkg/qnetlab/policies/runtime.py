"""
Runtime policies: one instance per replication, built from an immutable PolicySpec
"""
import math
from abc import ABC, abstractmethod
from collections import deque
from typing import Optional, Sequence

import numpy as np

from ..errors import UnknownConstraintStateError
from ..model.topology import NetworkTopology
from ..potentials.algebra import pressure
from ..potentials.nodes import Potential
from ..regions.region import DepartureRegion
from .selection import (
    PolicyMemory,
    Selection,
    best_vertex,
    select_max_scalar,
    select_memory_dynamic,
    select_with_memory,
)


class Policy(ABC):
    """Selects a feasible departure vector for the true state x in constraint state s_d"""

    def __init__(self, topology: NetworkTopology, regions: Sequence[DepartureRegion]):
        self.topology = topology
        self.regions = tuple(regions)

    def region(self, s_d: int) -> DepartureRegion:
        if not 0 <= s_d < len(self.regions):
            raise UnknownConstraintStateError(f"constraint state {s_d} out of range")
        return self.regions[s_d]

    @property
    @abstractmethod
    def potential(self) -> Potential:
        ...

    @property
    def memory(self) -> Optional[PolicyMemory]:
        return None

    @abstractmethod
    def select(self, x: np.ndarray, s_d: int, z: Optional[np.ndarray] = None) -> Selection:
        """
        Args:
            x: true queue state (truncation always uses it)
            s_d: current constraint state
            z: state the weights are computed from, when a wrapper supplies a stale view
        """

    def weights(self, x: np.ndarray) -> np.ndarray:
        return pressure(self.potential, x, self.topology)

    def exact(self, x: np.ndarray, s_d: int) -> Selection:
        """The exact max-scalar choice for x, used by diagnostics"""
        return best_vertex(self.weights(x), x, self.region(s_d))


class MaxScalarPolicy(Policy):
    def __init__(self, potential: Potential, topology, regions):
        super().__init__(topology, regions)
        self._potential = potential

    @property
    def potential(self) -> Potential:
        return self._potential

    def select(self, x, s_d, z=None):
        return select_max_scalar(self._potential, x, self.region(s_d), self.topology, z)


class MemoryPolicy(Policy):
    """Pick-and-compare for a single, static departure region"""

    def __init__(self, potential: Potential, topology, regions, rng: np.random.Generator):
        super().__init__(topology, regions)
        self._potential = potential
        self.rng = rng
        self._memory = PolicyMemory.initial(self.regions[:1])

    @property
    def potential(self) -> Potential:
        return self._potential

    @property
    def memory(self) -> PolicyMemory:
        return self._memory

    def remembered(self, s_d: int) -> int:
        return self._memory.remembered(0)

    def select(self, x, s_d, z=None):
        return select_with_memory(self._potential, x, self.region(s_d), self.topology, self._memory, self.rng, z)


class MemoryDynamicPolicy(MemoryPolicy):
    """Pick-and-compare with one memorized vertex per constraint state"""

    def __init__(self, potential: Potential, topology, regions, rng: np.random.Generator):
        super().__init__(potential, topology, regions, rng)
        self._memory = PolicyMemory.initial(self.regions)

    def remembered(self, s_d: int) -> int:
        return self._memory.remembered(s_d)

    def select(self, x, s_d, z=None):
        return select_memory_dynamic(
            self._potential, x, self.region(s_d), self.topology, self._memory, s_d, self.rng, z
        )


class WrappedPolicy(Policy):
    def __init__(self, inner: Policy):
        super().__init__(inner.topology, inner.regions)
        self.inner = inner

    @property
    def potential(self) -> Potential:
        return self.inner.potential

    @property
    def memory(self) -> Optional[PolicyMemory]:
        return self.inner.memory


class StalePolicy(WrappedPolicy):
    """Weights computed from Z_t = X_{max(t-d, 0)}; truncation still uses the true X_t"""

    def __init__(self, inner: Policy, delay: int):
        super().__init__(inner)
        self.delay = delay
        self._history = deque(maxlen=delay + 1)
        self._view = inner.memory or PolicyMemory()

    @property
    def memory(self) -> PolicyMemory:
        return self._view

    def select(self, x, s_d, z=None):
        observed = x if z is None else z
        self._history.append(np.array(observed, copy=True))
        stale = self._history[0]
        self._view.stale_state = stale
        self._view.stale_age = len(self._history) - 1
        return self.inner.select(x, s_d, stale)


class FramePolicy(WrappedPolicy):
    """
    Recompute the vertex every k slots and reuse it (truncated by x) in between

    A change of departure region forces an early recomputation.
    """

    def __init__(self, inner: Policy, k: int):
        super().__init__(inner)
        self.k = k
        self._age = 0
        self._vertex: Optional[int] = None
        self._region: Optional[DepartureRegion] = None

    def select(self, x, s_d, z=None):
        region = self.region(s_d)
        if self._vertex is None or self._age % self.k == 0 or region is not self._region:
            sel = self.inner.select(x, s_d, z)
            self._vertex = sel.vertex_id
            self._region = region
            self._age = 1
            return sel
        self._age += 1
        return Selection(np.minimum(region.vertices[self._vertex], x), self._vertex, math.nan)
