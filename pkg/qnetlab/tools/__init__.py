"""
Tools published by the qnetlab service
"""
from .experiments import (
    qnetlab_run_experiment,
    qnetlab_sweep,
    qnetlab_list_presets,
    qnetlab_list_runs,
    qnetlab_get_run,
    resolve_experiment,
    check_budget,
    plain,
)
from .analysis import qnetlab_check_capacity, qnetlab_validate

__all__ = [
    "qnetlab_run_experiment",
    "qnetlab_sweep",
    "qnetlab_list_presets",
    "qnetlab_list_runs",
    "qnetlab_get_run",
    "resolve_experiment",
    "check_budget",
    "plain",
    "qnetlab_check_capacity",
    "qnetlab_validate",
]
