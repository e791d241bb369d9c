"""
Scheduling policies: grad-G max-scalar, memory variants and stale-information wrappers
"""
from .selection import (
    TIE_TOLERANCE,
    Selection,
    PolicyMemory,
    best_vertex,
    select_max_scalar,
    select_with_memory,
    select_memory_dynamic,
)
from .runtime import (
    Policy,
    MaxScalarPolicy,
    MemoryPolicy,
    MemoryDynamicPolicy,
    StalePolicy,
    FramePolicy,
)
from .spec import PolicySpec, wrap_stale, parse_policy
from .diagnostics import MemoryCertificate, base_policy

__all__ = [
    "TIE_TOLERANCE",
    "Selection",
    "PolicyMemory",
    "best_vertex",
    "select_max_scalar",
    "select_with_memory",
    "select_memory_dynamic",
    "Policy",
    "MaxScalarPolicy",
    "MemoryPolicy",
    "MemoryDynamicPolicy",
    "StalePolicy",
    "FramePolicy",
    "PolicySpec",
    "wrap_stale",
    "parse_policy",
    "MemoryCertificate",
    "base_policy",
]
