"""
Experiment tools: run, sweep, presets and the run ledger
"""
import asyncio
import json
import logging
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

from sqlalchemy import select
from sqlalchemy.ext.asyncio import AsyncSession

from ..db.models import ExperimentRun
from ..errors import ConfigError, QnetlabError
from ..harness.config import Experiment, apply_overrides, experiment_from_dict
from ..harness.output import dump_json
from ..harness.presets import list_presets, preset_config
from ..harness.runner import run_experiment, sweep

logger = logging.getLogger(__name__)

MAX_SLOTS = int(os.getenv("QNETLAB_MAX_SLOTS", "4000000"))
OUTPUT_ROOT = os.getenv("QNETLAB_OUTPUT_ROOT")
OVERRIDE_KEYS = {"seed", "slots", "replications", "allow_unvalidated"}


def resolve_experiment(
    config: Optional[Dict[str, Any]] = None,
    preset: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> Experiment:
    """
    Build an Experiment from an inline config or a preset name, plus overrides

    Output goes under QNETLAB_OUTPUT_ROOT when it is set, and nowhere otherwise;
    a request cannot choose its own output directory.

    Raises:
        ConfigError: both or neither source given, unknown override keys, or an invalid config
    """
    if (config is None) == (preset is None):
        raise ConfigError("give exactly one of 'config' or 'preset'")
    overrides = dict(overrides or {})
    unknown = set(overrides) - OVERRIDE_KEYS
    if unknown:
        raise ConfigError(f"unknown overrides {sorted(unknown)} (allowed: {sorted(OVERRIDE_KEYS)})")
    data = dict(config) if config is not None else preset_config(preset)
    data = apply_overrides(data, overrides.get("seed"), overrides.get("slots"), overrides.get("replications"))
    if overrides.get("allow_unvalidated"):
        data["allow_unvalidated"] = True
    data.pop("output", None)
    exp = experiment_from_dict(data)
    exp.output_dir = None
    if OUTPUT_ROOT:
        exp.output_dir = Path(OUTPUT_ROOT) / f"{exp.name}-{exp.digest}"
    return exp


def plain(data: Any) -> Any:
    """JSON-safe copy: numpy scalars become Python numbers, non-finite floats become None"""
    def _finite(obj):
        if isinstance(obj, float) and not math.isfinite(obj):
            return None
        if isinstance(obj, dict):
            return {k: _finite(v) for k, v in obj.items()}
        if isinstance(obj, list):
            return [_finite(v) for v in obj]
        return obj

    return _finite(json.loads(dump_json(data)))


def check_budget(exp: Experiment, cells: int = 1):
    """Reject requests whose total simulated slots exceed QNETLAB_MAX_SLOTS"""
    total = exp.horizon * exp.replications * cells
    if total > MAX_SLOTS:
        raise ConfigError(
            f"request simulates {total} slots, above the service limit of {MAX_SLOTS}"
        )


async def qnetlab_run_experiment(
    db: AsyncSession,
    config: Optional[Dict[str, Any]] = None,
    preset: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Simulate an experiment and record it in the run ledger

    Args:
        db: ledger session
        config: experiment config mapping (YAML schema as JSON)
        preset: built-in preset name, instead of config
        overrides: seed, slots, replications, allow_unvalidated

    Returns:
        Run id, merged summary and admissibility
    """
    try:
        exp = resolve_experiment(config, preset, overrides)
        check_budget(exp)
        summary = await asyncio.to_thread(run_experiment, exp)
    except QnetlabError as e:
        logger.warning("run rejected: %s", e)
        return {"error": str(e)}

    data = plain(summary.to_dict())
    adm = summary.admissibility
    run = ExperimentRun(
        name=summary.name,
        config_digest=summary.config_digest,
        seed=summary.seed,
        horizon=summary.horizon,
        replications=exp.replications,
        policy=summary.policy,
        margin=None if adm.unbounded else float(adm.margin),
        verdict=adm.verdict,
        classification=summary.classification,
        summary=data,
    )
    db.add(run)
    await db.commit()
    logger.info("recorded run %d (%s)", run.id, summary.name)

    return {
        "success": True,
        "run_id": run.id,
        "name": summary.name,
        "classification": summary.classification,
        "admissibility": data["admissibility"],
        "merged": data["merged"],
        "output_dir": str(summary.output_dir) if summary.output_dir else None,
        "timing": plain(summary.wall_clock),
    }


async def qnetlab_sweep(
    grid: List[float],
    config: Optional[Dict[str, Any]] = None,
    preset: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Run the experiment at every load multiplier of the grid

    Returns:
        One row per multiplier; failed cells carry an error message
    """
    try:
        grid = [float(g) for g in grid or []]
        if not grid or any(g <= 0 for g in grid):
            raise ConfigError("grid needs positive load multipliers")
        exp = resolve_experiment(config, preset, overrides)
        check_budget(exp, len(grid))
        rows = await asyncio.to_thread(sweep, exp, grid)
    except (QnetlabError, TypeError, ValueError) as e:
        return {"error": str(e)}
    return {"name": exp.name, "rows": plain([r.to_dict() for r in rows])}


async def qnetlab_list_presets() -> Dict[str, Any]:
    """List the built-in experiment presets"""
    presets = list_presets()
    return {"presets": presets, "count": len(presets)}


async def qnetlab_list_runs(db: AsyncSession, limit: int = 20, name: Optional[str] = None) -> Dict[str, Any]:
    """
    List recorded runs, newest first

    Args:
        db: ledger session
        limit: maximum number of runs (1..200)
        name: only runs with this experiment name
    """
    limit = max(1, min(int(limit), 200))
    query = select(ExperimentRun).order_by(ExperimentRun.id.desc()).limit(limit)
    if name:
        query = query.where(ExperimentRun.name == name)
    result = await db.execute(query)
    runs = [r.to_dict() for r in result.scalars().all()]
    return {"runs": runs, "count": len(runs)}


async def qnetlab_get_run(db: AsyncSession, run_id: int) -> Dict[str, Any]:
    """Full record of one run, summary included"""
    result = await db.execute(select(ExperimentRun).where(ExperimentRun.id == run_id))
    run = result.scalar_one_or_none()
    if not run:
        return {"error": "Run not found"}
    return run.to_dict(with_summary=True)
