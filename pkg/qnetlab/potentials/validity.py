"""
Numeric spot checks of the weak/strong potential conditions
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from ..model.topology import NetworkTopology
from ..regions.region import DepartureRegion
from .algebra import pressure
from .nodes import Potential

logger = logging.getLogger(__name__)

PASS = "pass (numeric)"
FAIL = "fail (witness)"
DECLARED = "declared (structural)"

NUMERIC_CONDITIONS = ("asympG", "subexp", "negder", "posorien")

POSORIEN_NOTE = (
    "positive orientation is checked over region vertices only, "
    "the departure vectors a policy can actually use"
)


@dataclass
class PotentialCheckConfig:
    rays: int = 16
    scales: Tuple[float, ...] = (1e2, 1e3, 1e4, 1e5, 1e6)
    seed: int = 7
    margin: float = 1e-3
    asymp_threshold: float = 10.0
    subexp_tolerance: float = 1e-2
    perturbation: int = 10
    negder_tolerance: float = 1e-9
    beta: Optional[float] = None

    @classmethod
    def from_dict(cls, spec: Optional[Dict[str, Any]]) -> "PotentialCheckConfig":
        spec = dict(spec or {})
        if "scales" in spec:
            spec["scales"] = tuple(float(s) for s in spec["scales"])
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in spec.items() if k in known})


@dataclass
class Verdict:
    status: str
    witness: Optional[Dict[str, Any]] = None
    margin: Optional[float] = None

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"status": self.status}
        if self.margin is not None:
            out["margin"] = self.margin
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class ValidityReport:
    potential: str
    verdicts: Dict[str, Verdict] = field(default_factory=dict)
    h0: int = 0
    declared_class: str = "strong"
    beta: Optional[float] = None
    notes: List[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not any(v.failed for v in self.verdicts.values())

    @property
    def failures(self) -> List[str]:
        return [name for name, v in self.verdicts.items() if v.failed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "potential": self.potential,
            "valid": self.valid,
            "verdicts": {k: v.to_dict() for k, v in self.verdicts.items()},
            "h0": self.h0,
            "declared_class": self.declared_class,
            "beta": self.beta,
            "notes": list(self.notes),
        }


def _rays(m: int, n_random: int, rng: np.random.Generator) -> np.ndarray:
    """Unit coordinate rays, the diagonal, then random non-negative unit directions"""
    rays = [np.eye(m)[i] for i in range(m)]
    rays.append(np.ones(m))
    if n_random > 0:
        rays.extend(rng.random((n_random, m)))
    rays = np.array(rays)
    return rays / np.linalg.norm(rays, axis=1, keepdims=True)


def _point(v: np.ndarray) -> List[float]:
    return [float(f"{c:.6g}") for c in v]


def _check_asymp(g: Potential, rays: np.ndarray, cfg: PotentialCheckConfig) -> Verdict:
    scales = np.asarray(cfg.scales, dtype=float)
    worst = np.inf
    for ray in rays:
        ratios = g.value(scales[:, None] * ray[None, :]) / scales
        if not np.all(np.isfinite(ratios)):
            return Verdict(FAIL, {"ray": _point(ray), "ratios": [float(r) for r in ratios]})
        increasing = bool(np.all(np.diff(ratios) > 0))
        if not increasing or ratios[-1] <= cfg.asymp_threshold:
            return Verdict(FAIL, {
                "ray": _point(ray),
                "scales": [float(s) for s in scales],
                "ratios": [float(f"{r:.6g}") for r in ratios],
                "threshold": cfg.asymp_threshold,
            })
        worst = min(worst, float(ratios[-1]))
    return Verdict(PASS, margin=worst)


def _check_subexp(g: Potential, rays: np.ndarray, cfg: PotentialCheckConfig,
                  rng: np.random.Generator) -> Verdict:
    s = float(max(cfg.scales))
    worst = 0.0
    for ray in rays:
        x = s * ray
        y = rng.integers(-cfg.perturbation, cfg.perturbation + 1, size=x.shape)
        xy = np.maximum(x + y, 0.0)
        gx = float(g.value(x))
        if gx == 0.0:
            continue
        value_dev = abs(float(g.value(xy)) / gx - 1.0)
        # directional derivative along the ray itself
        slope = float(g.gradient(x) @ ray)
        grad_dev = abs(float(g.gradient(xy) @ ray) / slope - 1.0) if slope > 0 else 0.0
        dev = max(value_dev, grad_dev)
        if dev > cfg.subexp_tolerance:
            return Verdict(FAIL, {
                "x": _point(x), "y": [int(v) for v in y],
                "value_deviation": value_dev, "gradient_deviation": grad_dev,
                "tolerance": cfg.subexp_tolerance,
            })
        worst = max(worst, dev)
    return Verdict(PASS, margin=cfg.subexp_tolerance - worst)


def _check_negder(g: Potential, t: NetworkTopology, rays: np.ndarray,
                  cfg: PotentialCheckConfig, rng: np.random.Generator) -> Verdict:
    m = t.m_virtual
    worst = -np.inf
    scales = (1.0,) + tuple(cfg.scales)
    for ray in rays:
        zeros = rng.random(m) < 0.5
        if not zeros.any():
            zeros[rng.integers(m)] = True
        for s in scales:
            x = np.where(zeros, 0.0, s * ray)
            d = np.where(zeros, rng.random(m) + 0.1, 0.0)
            grad = g.gradient(x)
            score = float(pressure(g, x, t) @ d)
            tol = cfg.negder_tolerance * max(1.0, float(np.linalg.norm(grad) * np.linalg.norm(d)))
            if score > tol:
                return Verdict(FAIL, {
                    "x": _point(x), "d": _point(d), "score": score, "tolerance": tol,
                })
            worst = max(worst, score)
    return Verdict(PASS, margin=-worst if np.isfinite(worst) else None)


def _check_posorien(g: Potential, t: NetworkTopology, rays: np.ndarray,
                    regions: Iterable[DepartureRegion], cfg: PotentialCheckConfig) -> Verdict:
    regions = list(regions)
    if not regions:
        return Verdict(DECLARED, {"reason": "no departure region supplied"})
    worst = np.inf
    for s in cfg.scales[-2:]:
        for ray in rays:
            x = s * ray
            grad = g.gradient(x)
            norm = float(np.linalg.norm(grad))
            if norm == 0.0:
                continue
            p = pressure(g, x, t)
            for region in regions:
                best = float((region.vertices @ p).max()) / norm
                if best < cfg.margin:
                    return Verdict(FAIL, {
                        "x": _point(x), "region": region.label,
                        "best_normalized_score": best, "margin": cfg.margin,
                    })
                worst = min(worst, best)
    return Verdict(PASS, margin=worst if np.isfinite(worst) else None)


def check_potential(
    g: Potential,
    t: NetworkTopology,
    regions: Iterable[DepartureRegion] = (),
    cfg: Optional[PotentialCheckConfig] = None,
) -> ValidityReport:
    """
    Sample the growth, sub-exponential, boundary and orientation conditions

    Numeric checks can refute a condition but never prove its limit, so
    polynomial order is reported from the family declaration instead.
    Failures are verdicts, never exceptions.
    """
    cfg = cfg or PotentialCheckConfig()
    rng = np.random.default_rng(cfg.seed)
    rays = _rays(t.m_virtual, cfg.rays, rng)

    report = ValidityReport(
        potential=g.describe(),
        h0=g.h0,
        declared_class=g.declared_class,
        beta=cfg.beta,
        notes=[POSORIEN_NOTE],
    )
    report.verdicts["asympG"] = _check_asymp(g, rays, cfg)
    report.verdicts["subexp"] = _check_subexp(g, rays, cfg, rng)
    report.verdicts["negder"] = _check_negder(g, t, rays, cfg, rng)
    report.verdicts["posorien"] = _check_posorien(g, t, rays, regions, cfg)
    report.verdicts["polynomial-order"] = Verdict(
        DECLARED, {"h0": g.h0, "degree": g.degree, "log_factor": g.log_factor}
    )
    if not report.valid:
        logger.info("potential %s failed: %s", report.potential, ", ".join(report.failures))
    return report
