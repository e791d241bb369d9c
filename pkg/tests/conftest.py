import os
import tempfile
from pathlib import Path

# the ledger engine is created at import time, so point it at a scratch file first
_LEDGER_DIR = tempfile.mkdtemp(prefix="qnetlab-tests-")
os.environ["DATABASE_URL"] = f"sqlite+aiosqlite:///{Path(_LEDGER_DIR) / 'runs.db'}"
os.environ.setdefault("QNETLAB_MAX_SLOTS", "400000")

import numpy as np
import pytest

from qnetlab.model import ArrivalProcess, NetworkTopology
from qnetlab.regions import ContentionGraph, independent_set_region, switch_region


@pytest.fixture
def switch2():
    return switch_region(2, "switch2")


@pytest.fixture
def path4():
    return independent_set_region(ContentionGraph.path(4), "path4")


@pytest.fixture
def single_hop4():
    return NetworkTopology.single_hop(4)


@pytest.fixture
def uniform_arrivals():
    def make(rate: float, m: int = 4) -> ArrivalProcess:
        return ArrivalProcess.bernoulli([rate] * m)
    return make


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


SWITCH_QUADRATIC = "max_scalar(sum_scalar(pow(1.0)))"


@pytest.fixture
def switch_config():
    """Raw config of a small 2x2 switch experiment"""
    def make(rate: float = 0.45, policy: str = SWITCH_QUADRATIC, **extra) -> dict:
        cfg = {
            "name": "test-switch2",
            "arrivals": {"states": [{"rates": [rate] * 4}]},
            "constraints": {"regions": {"switch": {"preset": "switch", "ports": 2}}},
            "policy": policy,
            "horizon": 4000,
            "seed": 3,
            "replications": 1,
        }
        cfg.update(extra)
        return cfg
    return make
