"""
Empirical stability diagnostics
"""
from .recorder import (
    MomentAccumulator,
    StatsRecorder,
    MomentReport,
    moment_report,
)
from .slope import SlopeConfig, SlopeResult, slope_test, STABLE, UNSTABLE, INCONCLUSIVE
from .drift import DriftBin, DriftProfile, drift_edges, drift_profile
from .regeneration import RegenerationLog, regeneration_moments

__all__ = [
    "MomentAccumulator",
    "StatsRecorder",
    "MomentReport",
    "moment_report",
    "SlopeConfig",
    "SlopeResult",
    "slope_test",
    "STABLE",
    "UNSTABLE",
    "INCONCLUSIVE",
    "DriftBin",
    "DriftProfile",
    "drift_edges",
    "drift_profile",
    "RegenerationLog",
    "regeneration_moments",
]
