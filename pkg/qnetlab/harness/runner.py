"""
Experiment runner: replications, summaries, load sweeps and validation
"""
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..capacity.admissibility import AdmissibilityResult, check_admissible
from ..errors import ConfigError, InsufficientDataError, QnetlabError
from ..model.chains import joint_index
from ..model.processes import mean_rate
from ..model.streams import replication_streams
from ..potentials.validity import ValidityReport, check_potential
from ..stability.drift import DriftProfile, drift_edges, drift_profile
from ..stability.recorder import MomentAccumulator, StatsRecorder, moment_report
from ..stability.regeneration import regeneration_moments
from ..stability.slope import INCONCLUSIVE, STABLE, UNSTABLE, slope_test
from .config import Experiment
from .output import SCHEMA_VERSION, write_outputs
from .simulator import ReplicationResult, simulate, simulate_index

logger = logging.getLogger(__name__)

WORKERS = int(os.getenv("QNETLAB_WORKERS", "1"))


@dataclass
class ReplicationSummary:
    index: int
    mean_backlog: float
    moments: List[Dict[str, Any]]
    slope: Optional[Dict[str, Any]]
    drift: Optional[DriftProfile]
    regeneration: Optional[Dict[str, Any]]
    certificate: Optional[Dict[str, Any]]
    accumulator: MomentAccumulator = field(repr=False, default=None)
    notes: List[str] = field(default_factory=list)

    @property
    def classification(self) -> str:
        return self.slope["classification"] if self.slope else INCONCLUSIVE

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "mean_backlog": self.mean_backlog,
            "moments": self.moments,
            "slope": self.slope,
            "drift": self.drift.to_dict() if self.drift else None,
            "regeneration": self.regeneration,
            "memory_certificate": self.certificate,
            "notes": self.notes,
        }


@dataclass
class RunSummary:
    name: str
    config_digest: str
    seed: int
    horizon: int
    policy: str
    admissibility: AdmissibilityResult
    validity: ValidityReport
    replications: List[ReplicationSummary]
    merged: Dict[str, Any]
    wall_clock: Dict[str, float] = field(default_factory=dict)
    output_dir: Optional[Path] = None

    @property
    def classification(self) -> str:
        return self.merged["classification"]

    def to_dict(self) -> Dict[str, Any]:
        """Deterministic summary; wall-clock timing is kept apart"""
        return {
            "schema": SCHEMA_VERSION,
            "name": self.name,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "horizon": self.horizon,
            "policy": self.policy,
            "admissibility": self.admissibility.to_dict(),
            "potential": self.validity.to_dict(),
            "replications": [r.to_dict() for r in self.replications],
            "merged": self.merged,
        }


def _summarize(exp: Experiment, res: ReplicationResult, edges: np.ndarray) -> ReplicationSummary:
    notes = []
    warmup = exp.warmup
    recorder = StatsRecorder(exp.sample_every, exp.moments, warmup)
    recorder.record_batch(np.arange(exp.horizon + 1), res.states)
    times = recorder.times
    l1 = recorder.l1
    post = times >= warmup
    mean_backlog = float(l1[post].mean()) if post.any() else 0.0
    moments = [moment_report(recorder, h).to_dict() for h in range(1, exp.moments + 1)]

    slope = None
    try:
        slope = slope_test(l1, exp.slope, times).to_dict()
    except InsufficientDataError as e:
        notes.append(f"slope: {e}")

    drift = None
    potential = exp.drift.potential or exp.policy.base_potential
    try:
        drift = drift_profile(
            res.states, potential, normalizer=exp.policy.base_potential, edges=edges,
            min_count=exp.drift.min_count, with_hessian=exp.drift.hessian,
        )
    except InsufficientDataError as e:
        notes.append(f"drift: {e}")

    regeneration = None
    n_d = exp.constraints.n_states
    joint = joint_index(res.s_a.astype(np.int64), res.s_d.astype(np.int64), n_d)
    anchor = joint_index(exp.arrivals.chain.initial, exp.constraints.chain.initial, n_d)
    try:
        regeneration = regeneration_moments(joint, anchor).to_dict()
    except InsufficientDataError as e:
        notes.append(f"regeneration: {e}")

    return ReplicationSummary(
        res.index, mean_backlog, moments, slope, drift, regeneration,
        res.certificate.to_dict() if res.certificate else None, recorder.acc, notes,
    )


def _merge(exp: Experiment, reps: List[ReplicationSummary]) -> Dict[str, Any]:
    """Ordered reduce over replications (index order)"""
    acc = reps[0].accumulator
    drift = reps[0].drift
    for r in reps[1:]:
        acc = acc.merge(r.accumulator)
        if drift is not None and r.drift is not None:
            drift = drift.merge(r.drift)
    verdicts = [r.classification for r in reps]
    if any(v == UNSTABLE for v in verdicts):
        classification = UNSTABLE
    elif all(v == STABLE for v in verdicts):
        classification = STABLE
    else:
        classification = INCONCLUSIVE
    slopes = [r.slope["slope"] for r in reps if r.slope]
    return {
        "mean_backlog": float(np.mean([r.mean_backlog for r in reps])),
        "moments": [float(v) for v in acc.means()],
        "samples": acc.count,
        "slope": float(np.mean(slopes)) if slopes else None,
        "classification": classification,
        "verdicts": verdicts,
        "drift": drift.to_dict() if drift else None,
        "bounded": {
            str(h): all(r.moments[h - 1]["bounded"] for r in reps) for h in range(1, exp.moments + 1)
        },
    }


def admissibility(exp: Experiment) -> AdmissibilityResult:
    return check_admissible(
        mean_rate(exp.arrivals), exp.topology, exp.constraints, exp.regions, exp.dominance
    )


def validity(exp: Experiment) -> ValidityReport:
    return check_potential(exp.policy.base_potential, exp.topology, exp.region_list, exp.potential_check)


def simulate_all(exp: Experiment, workers: Optional[int] = None) -> List[ReplicationResult]:
    """All replications, in replication-index order; a process pool when workers > 1"""
    workers = WORKERS if workers is None else workers
    if workers > 1 and exp.replications > 1:
        with ProcessPoolExecutor(max_workers=min(workers, exp.replications)) as pool:
            futures = [pool.submit(simulate_index, exp, i) for i in range(exp.replications)]
            return [f.result() for f in futures]
    return [simulate(exp, s) for s in replication_streams(exp.seed, exp.replications)]


def run_experiment(exp: Experiment, workers: Optional[int] = None, write: bool = True) -> RunSummary:
    """
    Check the potential and the load, simulate every replication, summarize,
    and write the artifacts when an output directory is configured

    Raises:
        ConfigError: the policy potential fails its checks without allow_unvalidated
        InfeasibleDepartureError: a policy produced an infeasible departure
    """
    started = time.perf_counter()
    report = validity(exp)
    if not report.valid:
        if not exp.allow_unvalidated:
            raise ConfigError(
                f"potential {report.potential} fails {', '.join(report.failures)}; "
                "set allow_unvalidated to simulate anyway"
            )
        logger.warning("simulating with unvalidated potential %s", report.potential)
    adm = admissibility(exp)
    if not adm.admissible:
        logger.warning("load is outside the capacity region (margin %.4g)", adm.margin)
    logger.info(
        "running %s: %d replication(s) x %d slots, policy %s",
        exp.name, exp.replications, exp.horizon, exp.policy.describe(),
    )

    results = simulate_all(exp, workers)
    max_l1 = max(float(r.states.sum(axis=1).max()) for r in results)
    edges = drift_edges(max_l1, exp.drift.bins)
    reps = [_summarize(exp, r, edges) for r in results]

    summary = RunSummary(
        name=exp.name,
        config_digest=exp.digest,
        seed=exp.seed,
        horizon=exp.horizon,
        policy=exp.policy.describe(),
        admissibility=adm,
        validity=report,
        replications=reps,
        merged=_merge(exp, reps),
    )
    summary.wall_clock = {
        "total_seconds": time.perf_counter() - started,
        "replication_seconds": [r.seconds for r in results],
        "slots_per_second": exp.horizon * exp.replications / max(sum(r.seconds for r in results), 1e-9),
    }
    if write and exp.output_dir is not None:
        summary.output_dir = write_outputs(
            exp.output_dir, summary.to_dict(), summary.wall_clock, results, exp.sample_every
        )
    logger.info("%s: %s, mean backlog %.3f", exp.name, summary.classification, summary.merged["mean_backlog"])
    return summary


@dataclass
class SweepRow:
    rho: float
    margin: Optional[float]
    verdict: Optional[str]
    mean_backlog: Optional[float] = None
    slope: Optional[float] = None
    classification: Optional[str] = None
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def sweep(exp: Experiment, grid: Sequence[float], workers: Optional[int] = None) -> List[SweepRow]:
    """
    Scale the arrival rates by every rho in the grid, re-check admissibility and run

    Cells fail independently; a failed cell carries its error message.
    """
    if not grid:
        raise ConfigError("sweep needs a non-empty load grid")
    rows = []
    for rho in grid:
        rho = float(rho)
        try:
            arrivals = exp.arrivals if rho == 1.0 else exp.arrivals.scaled(rho)
            cell = exp.with_arrivals(arrivals, name=f"{exp.name}-rho{rho:g}")
            if exp.output_dir is not None:
                cell.output_dir = exp.output_dir / f"rho_{rho:g}"
            summary = run_experiment(cell, workers)
            adm = summary.admissibility
            rows.append(SweepRow(
                rho, None if adm.unbounded else adm.margin, adm.verdict,
                summary.merged["mean_backlog"], summary.merged["slope"], summary.classification,
            ))
        except QnetlabError as e:
            logger.warning("sweep cell rho=%g failed: %s", rho, e)
            rows.append(SweepRow(rho, None, None, error=str(e)))
    return rows


@dataclass
class ValidationReport:
    topology: Dict[str, Any]
    potential: ValidityReport
    admissibility: AdmissibilityResult
    warnings: List[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if not self.topology["valid"] or not self.potential.valid:
            return 1
        return 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "topology": self.topology,
            "potential": self.potential.to_dict(),
            "admissibility": self.admissibility.to_dict(),
            "warnings": list(self.warnings),
            "exit_code": self.exit_code,
        }


def validate_cmd(exp: Experiment) -> ValidationReport:
    """Topology report, potential validity and admissibility; overload is only a warning"""
    report = ValidationReport(exp.topology.report.to_dict(), validity(exp), admissibility(exp))
    if not report.admissibility.admissible:
        report.warnings.append(
            f"load is inadmissible (margin {report.admissibility.margin:.4g}); simulating it will show instability"
        )
    return report
