"""
Reproducible random streams per replication and component
"""
from dataclasses import dataclass
from typing import List

import numpy as np


@dataclass
class ReplicationStreams:
    """Independent generators for one replication; never shared across replications"""
    index: int
    arrival: np.random.Generator
    constraint: np.random.Generator
    policy: np.random.Generator


def _generator(seq: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64DXSM(seq))


def replication_streams(seed: int, replications: int) -> List[ReplicationStreams]:
    """
    Split one experiment seed into per-replication, per-component streams

    Replication r always receives the same streams regardless of how many
    replications are requested or in which order they execute.
    """
    root = np.random.SeedSequence(seed)
    out = []
    for r, child in enumerate(root.spawn(replications)):
        arrival, constraint, policy = child.spawn(3)
        out.append(ReplicationStreams(r, _generator(arrival), _generator(constraint), _generator(policy)))
    return out
