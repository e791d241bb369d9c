"""
Immutable policy declarations and the policy mini-language
"""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..errors import ConfigError, PolicyConfigError
from ..model.topology import NetworkTopology
from ..potentials.language import POTENTIAL_FUNCTIONS, MatrixResolver, MiniLanguage
from ..potentials.nodes import Potential
from ..regions.region import DepartureRegion
from .runtime import (
    FramePolicy,
    MaxScalarPolicy,
    MemoryDynamicPolicy,
    MemoryPolicy,
    Policy,
    StalePolicy,
)

BASE_VARIANTS = ("max_scalar", "memory", "memory_dyn")
WRAPPERS = ("stale", "frame")


@dataclass(frozen=True)
class PolicySpec:
    """
    Declared policy: a base variant over a potential, or a wrapper around another spec

    Ties are always broken towards the lowest vertex id.
    """
    variant: str
    potential: Optional[Potential] = None
    inner: Optional["PolicySpec"] = None
    delay: Optional[int] = None
    frame: Optional[int] = None

    def __post_init__(self):
        if self.variant in BASE_VARIANTS:
            if not isinstance(self.potential, Potential):
                raise PolicyConfigError(f"{self.variant} needs a potential argument")
        elif self.variant == "stale":
            if self.inner is None or self.delay is None or int(self.delay) < 1:
                raise PolicyConfigError(f"stale wrapper needs delay >= 1, got {self.delay}")
        elif self.variant == "frame":
            if self.inner is None or self.frame is None or int(self.frame) < 1:
                raise PolicyConfigError(f"frame wrapper needs k >= 1, got {self.frame}")
        else:
            raise PolicyConfigError(f"unknown policy variant {self.variant!r}")

    @property
    def base(self) -> "PolicySpec":
        spec = self
        while spec.inner is not None:
            spec = spec.inner
        return spec

    @property
    def base_potential(self) -> Potential:
        return self.base.potential

    @property
    def uses_memory(self) -> bool:
        return self.base.variant in ("memory", "memory_dyn")

    def describe(self) -> str:
        if self.variant == "stale":
            return f"stale({self.inner.describe()}, delay={self.delay})"
        if self.variant == "frame":
            return f"frame({self.inner.describe()}, k={self.frame})"
        return f"{self.variant}({self.potential.describe()})"

    def build(
        self,
        topology: NetworkTopology,
        regions: Sequence[DepartureRegion],
        rng: np.random.Generator,
    ) -> Policy:
        """
        Runtime policy for one replication

        Args:
            regions: departure region of every constraint state, by state index
            rng: the replication's policy stream

        Raises:
            PolicyConfigError: `memory` used with more than one constraint state
        """
        if self.variant == "max_scalar":
            return MaxScalarPolicy(self.potential, topology, regions)
        if self.variant == "memory":
            if len(regions) > 1:
                raise PolicyConfigError(
                    "memory needs static constraints; use memory_dyn with a modulated constraint chain"
                )
            return MemoryPolicy(self.potential, topology, regions, rng)
        if self.variant == "memory_dyn":
            return MemoryDynamicPolicy(self.potential, topology, regions, rng)
        inner = self.inner.build(topology, regions, rng)
        if self.variant == "stale":
            return StalePolicy(inner, int(self.delay))
        return FramePolicy(inner, int(self.frame))


def wrap_stale(inner: PolicySpec, delay: Optional[int] = None, frame: Optional[int] = None) -> PolicySpec:
    """Imperfect-information wrapper: exactly one of delay d or frame k, each >= 1"""
    if (delay is None) == (frame is None):
        raise PolicyConfigError("wrap_stale needs exactly one of delay or frame")
    if delay is not None:
        return PolicySpec("stale", inner=inner, delay=int(delay))
    return PolicySpec("frame", inner=inner, frame=int(frame))


def _int_arg(name: str, v) -> int:
    if isinstance(v, bool) or not float(v).is_integer():
        raise PolicyConfigError(f"{name} must be an integer, got {v!r}")
    return int(v)


POLICY_FUNCTIONS = dict(POTENTIAL_FUNCTIONS)
POLICY_FUNCTIONS.update({
    "max_scalar": lambda g: PolicySpec("max_scalar", potential=g),
    "memory": lambda g: PolicySpec("memory", potential=g),
    "memory_dyn": lambda g: PolicySpec("memory_dyn", potential=g),
    "stale": lambda p, delay=1: wrap_stale(p, delay=_int_arg("delay", delay)),
    "frame": lambda p, k=1: wrap_stale(p, frame=_int_arg("k", k)),
})


def parse_policy(text: str, resolver: Optional[MatrixResolver] = None) -> PolicySpec:
    """
    Parse `max_scalar(<potential>)`, `memory(...)`, `memory_dyn(...)`,
    `stale(<policy>, delay=d)` or `frame(<policy>, k=k)`
    """
    result = MiniLanguage(POLICY_FUNCTIONS, resolver).parse(text)
    if not isinstance(result, PolicySpec):
        raise ConfigError(f"{text!r} is not a policy (got {type(result).__name__})")
    return result
