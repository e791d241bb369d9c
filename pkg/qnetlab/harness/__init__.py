"""
Experiment harness: config loading, presets, simulation and reporting
"""
from .config import (
    DriftConfig,
    Experiment,
    apply_overrides,
    experiment_from_dict,
    load_config,
    load_experiment,
)
from .presets import EXPERIMENT_PRESETS, list_presets, preset_config
from .simulator import ReplicationResult, simulate, simulate_index
from .output import SCHEMA_VERSION, dump_json, write_outputs
from .runner import (
    ReplicationSummary,
    RunSummary,
    SweepRow,
    ValidationReport,
    admissibility,
    run_experiment,
    sweep,
    validate_cmd,
)

__all__ = [
    "DriftConfig",
    "Experiment",
    "apply_overrides",
    "experiment_from_dict",
    "load_config",
    "load_experiment",
    "EXPERIMENT_PRESETS",
    "list_presets",
    "preset_config",
    "ReplicationResult",
    "simulate",
    "simulate_index",
    "SCHEMA_VERSION",
    "dump_json",
    "write_outputs",
    "ReplicationSummary",
    "RunSummary",
    "SweepRow",
    "ValidationReport",
    "admissibility",
    "run_experiment",
    "sweep",
    "validate_cmd",
]
