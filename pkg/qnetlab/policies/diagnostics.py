"""
Opt-in per-slot certificates for memory policies
"""
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from .runtime import MemoryPolicy, Policy, WrappedPolicy
from .selection import Selection, tie_tolerance

CERTIFICATE_TOLERANCE = 1e-9


def base_policy(policy: Policy) -> Policy:
    while isinstance(policy, WrappedPolicy):
        policy = policy.inner
    return policy


@dataclass
class MemoryCertificate:
    """
    Counts slots where the chosen vertex scores below the memorized one and
    slots where the choice equals the exact max-scalar value
    """
    slots: int = 0
    violations: int = 0
    exact_hits: int = 0
    worst_gap: float = 0.0
    first_violation: Optional[int] = None

    def before(self, policy: Policy, s_d: int) -> Optional[int]:
        base = base_policy(policy)
        if isinstance(base, MemoryPolicy):
            return base.remembered(s_d)
        return None

    def observe(self, policy: Policy, x: np.ndarray, s_d: int, sel: Selection,
                remembered: Optional[int], slot: int):
        if remembered is None:
            return
        mem = policy.memory
        view = mem.stale_state if mem is not None and mem.stale_state is not None else x
        weights = policy.weights(view)
        region = policy.region(s_d)
        chosen = float(np.minimum(region.vertices[sel.vertex_id], x) @ weights)
        kept = float(np.minimum(region.vertices[remembered], x) @ weights)
        gap = kept - chosen
        self.slots += 1
        if gap > CERTIFICATE_TOLERANCE:
            self.violations += 1
            if self.first_violation is None:
                self.first_violation = slot
        self.worst_gap = max(self.worst_gap, gap)
        exact = policy.exact(x, s_d)
        if chosen >= exact.value - tie_tolerance(exact.value):
            self.exact_hits += 1

    @property
    def exact_frequency(self) -> float:
        return self.exact_hits / self.slots if self.slots else 0.0

    def merge(self, other: "MemoryCertificate") -> "MemoryCertificate":
        firsts = [f for f in (self.first_violation, other.first_violation) if f is not None]
        return MemoryCertificate(
            self.slots + other.slots,
            self.violations + other.violations,
            self.exact_hits + other.exact_hits,
            max(self.worst_gap, other.worst_gap),
            min(firsts) if firsts else None,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slots": self.slots,
            "violations": self.violations,
            "exact_hits": self.exact_hits,
            "exact_frequency": self.exact_frequency,
            "worst_gap": self.worst_gap,
            "first_violation": self.first_violation,
        }
