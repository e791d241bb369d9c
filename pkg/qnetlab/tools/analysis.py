"""
Analysis tools: capacity check and pre-run validation
"""
from typing import Any, Dict, Optional

from ..errors import QnetlabError
from ..harness.runner import admissibility, validate_cmd
from .experiments import plain, resolve_experiment


async def qnetlab_check_capacity(
    config: Optional[Dict[str, Any]] = None,
    preset: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Admissibility of the experiment's mean load

    Returns:
        Verdict, margin (null when unbounded), workload, stationary law and witness weights
    """
    try:
        exp = resolve_experiment(config, preset, overrides)
        return plain(admissibility(exp).to_dict())
    except QnetlabError as e:
        return {"error": str(e)}


async def qnetlab_validate(
    config: Optional[Dict[str, Any]] = None,
    preset: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Topology report, potential validity and admissibility, without simulating

    An invalid potential shows up as exit_code 1 in the report, not as an error.
    """
    try:
        exp = resolve_experiment(config, preset, overrides)
        return plain(validate_cmd(exp).to_dict())
    except QnetlabError as e:
        return {"error": str(e)}
