"""
Experiment configuration: YAML documents into validated Experiment objects
"""
import copy
import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import yaml

from ..errors import ConfigError, PolicyConfigError, TopologyError
from ..model.chains import FiniteMarkovChain
from ..model.processes import ArrivalProcess, ConstraintProcess
from ..model.topology import NetworkTopology
from ..policies.spec import PolicySpec, parse_policy
from ..potentials.language import MatrixResolver, parse_potential
from ..potentials.nodes import Potential
from ..potentials.validity import PotentialCheckConfig
from ..regions.presets import build_region
from ..regions.region import DepartureRegion, conflict_matrix
from ..stability.drift import DEFAULT_BINS, DEFAULT_MIN_COUNT
from ..stability.recorder import DEFAULT_MOMENTS
from ..stability.slope import SlopeConfig

logger = logging.getLogger(__name__)

DEFAULT_WARMUP_FRACTION = 0.1


@dataclass
class DriftConfig:
    bins: int = DEFAULT_BINS
    min_count: int = DEFAULT_MIN_COUNT
    potential: Optional[Potential] = None
    hessian: bool = False


@dataclass
class Experiment:
    """A fully parsed and validated experiment declaration"""
    name: str
    topology: NetworkTopology
    arrivals: ArrivalProcess
    constraints: ConstraintProcess
    regions: Dict[str, DepartureRegion]
    policy: PolicySpec
    horizon: int
    seed: int = 1
    replications: int = 1
    sample_every: int = 1
    moments: int = DEFAULT_MOMENTS
    warmup_fraction: float = DEFAULT_WARMUP_FRACTION
    drift: DriftConfig = field(default_factory=DriftConfig)
    slope: SlopeConfig = field(default_factory=SlopeConfig)
    initial_backlog: Optional[np.ndarray] = None
    diagnostics: bool = False
    dominance: bool = False
    potential_check: PotentialCheckConfig = field(default_factory=PotentialCheckConfig)
    allow_unvalidated: bool = False
    output_dir: Optional[Path] = None
    raw: Dict[str, Any] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.initial_backlog is None:
            self.initial_backlog = np.zeros(self.m, dtype=np.int64)

    @property
    def m(self) -> int:
        return self.topology.m_virtual

    @property
    def region_list(self) -> List[DepartureRegion]:
        """Departure region of every constraint state, by state index"""
        return [self.regions[label] for label in self.constraints.region_of_state]

    @property
    def warmup(self) -> int:
        return int(self.horizon * self.warmup_fraction)

    @property
    def digest(self) -> str:
        text = json.dumps(self.raw, sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def with_arrivals(self, arrivals: ArrivalProcess, name: Optional[str] = None) -> "Experiment":
        raw = copy.deepcopy(self.raw)
        raw["arrivals"] = arrivals.to_dict()
        return replace(self, arrivals=arrivals, name=name or self.name, raw=raw)


def _int(spec: Dict[str, Any], key: str, default: int, minimum: int = None) -> int:
    value = spec.get(key, default)
    try:
        integral = not isinstance(value, bool) and float(value).is_integer()
    except (TypeError, ValueError):
        integral = False
    if not integral:
        raise ConfigError(f"'{key}' must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ConfigError(f"'{key}' must be >= {minimum}, got {value}")
    return value


def apply_overrides(
    data: Dict[str, Any],
    seed: Optional[int] = None,
    slots: Optional[int] = None,
    replications: Optional[int] = None,
    out: Optional[Union[str, Path]] = None,
) -> Dict[str, Any]:
    """Copy of a raw config with the command-line overrides applied"""
    data = copy.deepcopy(data)
    if seed is not None:
        data["seed"] = seed
    if slots is not None:
        data["horizon"] = slots
    if replications is not None:
        data["replications"] = replications
    if out is not None:
        data.setdefault("output", {})["dir"] = str(out)
    return data


def _build_topology(spec: Dict[str, Any], m: int) -> NetworkTopology:
    queues = spec.get("queues", m)
    if queues != m:
        raise TopologyError(f"topology declares {queues} queues, arrivals cover {m}")
    routing = spec.get("routing")
    if routing is None:
        t = NetworkTopology.single_hop(m)
    else:
        t = NetworkTopology.from_routing(routing, spec.get("physical"), spec.get("flows"))
    if t.m_virtual != m:
        raise TopologyError(f"routing matrix covers {t.m_virtual} queues, arrivals cover {m}")
    if not t.report.valid:
        raise TopologyError("invalid topology: " + "; ".join(t.report.violations))
    return t


def _build_constraints(spec: Dict[str, Any], m: int):
    region_specs = spec.get("regions")
    if not region_specs:
        raise ConfigError("constraints need at least one region")
    regions = {label: build_region(label, rs or {}) for label, rs in region_specs.items()}
    for label, r in regions.items():
        if r.m != m:
            raise ConfigError(f"region '{label}' has dimension {r.m}, network has {m} queues")
    states = spec.get("states")
    if states is None:
        if len(regions) != 1:
            raise ConfigError("constraints with several regions need an explicit 'states' list")
        states = list(regions)
    unknown = [s for s in states if s not in regions]
    if unknown:
        raise ConfigError(f"constraint states reference undeclared regions {unknown}")
    chain = FiniteMarkovChain.from_dict(spec.get("chain", {}))
    return ConstraintProcess(chain, tuple(states)), regions


def experiment_from_dict(data: Dict[str, Any], base_dir: Optional[Path] = None) -> Experiment:
    """
    Validate a raw config mapping and build the Experiment

    Raises:
        ConfigError: any invalid or inconsistent declaration
    """
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    if "arrivals" not in data:
        raise ConfigError("config needs an 'arrivals' section")
    if "policy" not in data:
        raise ConfigError("config needs a 'policy' string")

    arrivals = ArrivalProcess.from_dict(data["arrivals"])
    m = arrivals.m
    topology = _build_topology(data.get("topology") or {}, m)
    constraints, regions = _build_constraints(data.get("constraints") or {}, m)

    first = regions[constraints.region_of_state[0]]
    resolver = MatrixResolver(data.get("matrices"), conflict_matrix(first), base_dir)
    policy = parse_policy(str(data["policy"]), resolver)
    if policy.base.variant == "memory" and constraints.n_states > 1:
        raise PolicyConfigError("memory needs static constraints; use memory_dyn with a modulated constraint chain")

    drift_spec = data.get("drift") or {}
    drift = DriftConfig(
        bins=_int(drift_spec, "bins", DEFAULT_BINS, 1),
        min_count=_int(drift_spec, "min_count", DEFAULT_MIN_COUNT, 1),
        potential=parse_potential(drift_spec["potential"], resolver) if drift_spec.get("potential") else None,
        hessian=bool(drift_spec.get("hessian", False)),
    )

    record = data.get("record") or {}
    backlog = data.get("initial_backlog")
    if backlog is not None:
        backlog = np.asarray(backlog)
        if backlog.shape != (m,) or np.any(backlog < 0) or not np.all(np.mod(backlog, 1) == 0):
            raise ConfigError(f"initial_backlog must be {m} non-negative integers")
        backlog = backlog.astype(np.int64)

    warmup = float(data.get("warmup_fraction", DEFAULT_WARMUP_FRACTION))
    if not 0.0 <= warmup < 1.0:
        raise ConfigError(f"warmup_fraction must lie in [0, 1), got {warmup}")

    out = (data.get("output") or {}).get("dir")
    diagnostics = data.get("diagnostics") or {}
    return Experiment(
        name=str(data.get("name", "experiment")),
        topology=topology,
        arrivals=arrivals,
        constraints=constraints,
        regions=regions,
        policy=policy,
        horizon=_int(data, "horizon", 10000, 1),
        seed=_int(data, "seed", 1, 0),
        replications=_int(data, "replications", 1, 1),
        sample_every=_int(record, "sample_every", 1, 1),
        moments=_int(record, "moments", DEFAULT_MOMENTS, 1),
        warmup_fraction=warmup,
        drift=drift,
        slope=SlopeConfig.from_dict(data.get("slope")),
        initial_backlog=backlog,
        diagnostics=bool(diagnostics.get("memory_certificate", False)),
        dominance=bool((data.get("capacity") or {}).get("dominance", False)),
        potential_check=PotentialCheckConfig.from_dict(data.get("potential_check")),
        allow_unvalidated=bool(data.get("allow_unvalidated", False)),
        output_dir=Path(out) if out else None,
        raw=copy.deepcopy(data),
    )


def load_config(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a YAML config file into a raw mapping"""
    path = Path(path)
    try:
        with path.open() as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse config {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} is not a mapping")
    return data


def load_experiment(path: Union[str, Path], **overrides) -> Experiment:
    path = Path(path)
    data = apply_overrides(load_config(path), **overrides)
    return experiment_from_dict(data, path.parent)
