"""
Network model: topology, queue evolution and modulating processes
"""
from .topology import (
    Flow,
    NetworkTopology,
    TopologyReport,
    validate_topology,
    step,
    workload,
)
from .chains import FiniteMarkovChain, steady_state, joint_index
from .processes import (
    BatchDistribution,
    ArrivalProcess,
    ConstraintProcess,
    sample_arrivals,
    mean_rate,
)
from .streams import ReplicationStreams, replication_streams

__all__ = [
    "Flow",
    "NetworkTopology",
    "TopologyReport",
    "validate_topology",
    "step",
    "workload",
    "FiniteMarkovChain",
    "steady_state",
    "joint_index",
    "BatchDistribution",
    "ArrivalProcess",
    "ConstraintProcess",
    "sample_arrivals",
    "mean_rate",
    "ReplicationStreams",
    "replication_streams",
]
