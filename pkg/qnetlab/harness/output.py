"""
Batch artifacts: per-replication CSV series, summary and timing JSON
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict

import numpy as np

from .simulator import ReplicationResult

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def csv_header(m: int) -> str:
    return ",".join(["slot", "l1", "l2"] + [f"q_{i}" for i in range(m)] + ["vertex_id", "s_d"])


def write_replication_csv(path: Path, result: ReplicationResult, sample_every: int = 1):
    """Row t holds X_t and the decision taken in slot t"""
    horizon = result.vertex_ids.shape[0]
    slots = np.arange(0, horizon, sample_every)
    x = result.states[slots]
    l2 = np.linalg.norm(x.astype(float), axis=1)
    m = x.shape[1]
    with Path(path).open("w", newline="") as f:
        f.write(csv_header(m) + "\n")
        for t, row, norm in zip(slots.tolist(), x.tolist(), l2.tolist()):
            f.write(
                f"{t},{sum(row)},{norm:.6f},"
                + ",".join(str(v) for v in row)
                + f",{int(result.vertex_ids[t])},{int(result.s_d[t])}\n"
            )


def dump_json(data: Dict[str, Any]) -> str:
    """Deterministic JSON text (sorted keys, fixed indentation)"""
    return json.dumps(data, sort_keys=True, indent=2, default=_default) + "\n"


def _default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_outputs(out_dir: Path, summary: Dict[str, Any], timing: Dict[str, Any],
                  results, sample_every: int = 1) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for r in results:
        write_replication_csv(out_dir / f"rep_{r.index}.csv", r, sample_every)
    (out_dir / "summary.json").write_text(dump_json(summary))
    (out_dir / "timing.json").write_text(dump_json(timing))
    logger.info("wrote %d replication series and summary to %s", len(results), out_dir)
    return out_dir
