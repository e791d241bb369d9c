"""
Built-in experiment presets
"""
import copy
from typing import Any, Dict, List

from ..errors import ConfigError

# uniform per-VOQ capacity of the 2x2 switch and of the 4-vertex path graph
UNIFORM_CAPACITY = 0.5
LOAD_EPS_01 = UNIFORM_CAPACITY / 1.1

SWITCH2 = {"switch": {"preset": "switch", "ports": 2}}
PATH4 = {"graph": {"preset": "contention_graph", "vertices": 4, "edges": [[0, 1], [1, 2], [2, 3]]}}

PCS_Q = [
    [1.0, -0.25, 0.0, 0.0],
    [-0.25, 1.0, -0.25, 0.0],
    [0.0, -0.25, 1.0, -0.25],
    [0.0, 0.0, -0.25, 1.0],
]

QUADRATIC = "sum_scalar(pow(1.0))"


def _uniform(rate: float, m: int = 4) -> Dict[str, Any]:
    return {"states": [{"rates": [rate] * m}]}


def _preset(name: str, description: str, arrivals, regions, policy: str, **extra) -> Dict[str, Any]:
    cfg = {
        "name": name,
        "description": description,
        "arrivals": arrivals,
        "constraints": {"regions": regions},
        "policy": policy,
        "horizon": 1_000_000,
        "seed": 1,
        "replications": 4,
    }
    cfg.update(extra)
    return cfg


EXPERIMENT_PRESETS: Dict[str, Dict[str, Any]] = {
    p["name"]: p
    for p in [
        _preset(
            "switch2-base",
            "2x2 input-queued switch, Bernoulli 0.45 per VOQ, quadratic max-scalar",
            _uniform(0.45), SWITCH2, f"max_scalar({QUADRATIC})",
        ),
        _preset(
            "switch2-light",
            "2x2 input-queued switch, Bernoulli 0.40 per VOQ, quadratic max-scalar",
            _uniform(0.40), SWITCH2, f"max_scalar({QUADRATIC})",
        ),
        _preset(
            "switch2-overload",
            "2x2 input-queued switch above capacity, Bernoulli 0.55 per VOQ",
            _uniform(0.55), SWITCH2, f"max_scalar({QUADRATIC})",
        ),
        _preset(
            "pcs-path4",
            "path contention graph on 4 queues, non-diagonal quadratic weights at 10% margin",
            _uniform(LOAD_EPS_01), PATH4,
            "max_scalar(quad(identity, Q=@Q, pd=True, offdiag='nonpositive'))",
            matrices={"Q": PCS_Q},
        ),
        _preset(
            "lpf-switch2",
            "2x2 switch, longest-port-first style potential over the conflict matrix",
            _uniform(LOAD_EPS_01), SWITCH2, "max_scalar(lpf_quad(theta=1.0, P=@conflict))",
        ),
        _preset(
            "memory-switch2",
            "2x2 switch, pick-and-compare memory policy at 10% margin",
            _uniform(LOAD_EPS_01), SWITCH2, f"memory({QUADRATIC})",
            diagnostics={"memory_certificate": True},
        ),
        _preset(
            "memory-dynamic-switch2",
            "2x2 switch with a degraded constraint state, MMBP arrivals, per-state memory",
            {
                "chain": {"transition": [[0.9, 0.1], [0.1, 0.9]], "initial": 0},
                "states": [
                    {"rates": [1.4 * LOAD_EPS_01] * 4},
                    {"rates": [0.6 * LOAD_EPS_01] * 4},
                ],
            },
            {
                "full": {"preset": "switch", "ports": 2},
                "degraded": {"preset": "switch", "ports": 2, "drop": [[0, 1, 1, 0]]},
            },
            f"memory_dyn({QUADRATIC})",
            diagnostics={"memory_certificate": True},
        ),
        _preset(
            "stale-switch2",
            "2x2 switch at 25% margin, quadratic max-scalar on a 5-slot-old state",
            _uniform(0.40), SWITCH2, f"stale(max_scalar({QUADRATIC}), delay=5)",
        ),
        _preset(
            "frame-switch2",
            "2x2 switch at 25% margin, quadratic max-scalar recomputed every 20 slots",
            _uniform(0.40), SWITCH2, f"frame(max_scalar({QUADRATIC}), k=20)",
        ),
    ]
}

EXPERIMENT_PRESETS["memory-dynamic-switch2"]["constraints"].update({
    "chain": {"transition": [[0.9, 0.1], [0.2, 0.8]], "initial": 0},
    "states": ["full", "degraded"],
})


def list_presets() -> List[Dict[str, str]]:
    return [
        {"name": name, "description": cfg["description"], "policy": cfg["policy"]}
        for name, cfg in EXPERIMENT_PRESETS.items()
    ]


def preset_config(name: str) -> Dict[str, Any]:
    """Deep copy of a preset's raw config"""
    if name not in EXPERIMENT_PRESETS:
        raise ConfigError(f"unknown preset {name!r} (known: {', '.join(EXPERIMENT_PRESETS)})")
    return copy.deepcopy(EXPERIMENT_PRESETS[name])
