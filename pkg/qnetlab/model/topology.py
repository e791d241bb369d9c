"""
Network topology, routing validation and queue-state evolution
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from ..errors import ConfigError, InfeasibleDepartureError, TopologyError


@dataclass(frozen=True)
class Flow:
    """A flow and the ordered list of virtual queues it traverses"""
    index: int
    path: Tuple[int, ...]

    @property
    def source(self) -> int:
        return self.path[0]

    @property
    def destination(self) -> int:
        return self.path[-1]


@dataclass(frozen=True, eq=False)
class NetworkTopology:
    routing: np.ndarray
    pq_map: Tuple[int, ...]
    flows: Tuple[Flow, ...]

    @classmethod
    def from_routing(
        cls,
        routing: Sequence[Sequence[int]],
        physical: Optional[Sequence[int]] = None,
        flows: Optional[Sequence[Sequence[int]]] = None,
    ) -> "NetworkTopology":
        """
        Build a topology from a routing matrix

        Args:
            routing: M x M 0/1 matrix, r[m][p] = 1 sends departures of m into p
            physical: physical queue of every virtual queue (default: identity)
            flows: explicit flow paths (default: derived from the routing matrix)
        """
        r = np.asarray(routing, dtype=np.int64)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise TopologyError(f"routing matrix must be square, got shape {r.shape}")
        m = r.shape[0]
        pq = tuple(int(p) for p in physical) if physical is not None else tuple(range(m))
        if flows is None:
            paths = _derive_paths(r)
        else:
            paths = [tuple(int(q) for q in path) for path in flows]
        return cls(
            routing=r,
            pq_map=pq,
            flows=tuple(Flow(i, p) for i, p in enumerate(paths)),
        )

    @classmethod
    def single_hop(cls, m: int) -> "NetworkTopology":
        return cls.from_routing(np.zeros((m, m), dtype=np.int64))

    @property
    def m_virtual(self) -> int:
        return int(self.routing.shape[0])

    @property
    def n_physical(self) -> int:
        return len(set(self.pq_map))

    @cached_property
    def vq_map(self) -> Dict[int, FrozenSet[int]]:
        groups: Dict[int, set] = {}
        for v, p in enumerate(self.pq_map):
            groups.setdefault(p, set()).add(v)
        return {p: frozenset(vs) for p, vs in groups.items()}

    @cached_property
    def fl_map(self) -> Tuple[int, ...]:
        owner = [-1] * self.m_virtual
        for flow in self.flows:
            for q in flow.path:
                if 0 <= q < self.m_virtual and owner[q] < 0:
                    owner[q] = flow.index
        return tuple(owner)

    @property
    def fp_map(self) -> Dict[int, Tuple[int, ...]]:
        return {f.index: f.path for f in self.flows}

    @cached_property
    def transfer(self) -> np.ndarray:
        """(I - R) as an integer matrix"""
        return np.eye(self.m_virtual, dtype=np.int64) - self.routing

    @cached_property
    def is_single_hop(self) -> bool:
        return not self.routing.any()

    @cached_property
    def report(self) -> "TopologyReport":
        return validate_topology(self)

    def inverse(self) -> np.ndarray:
        """(I - R)^{-1}; raises TopologyError when the topology is invalid"""
        rep = self.report
        if not rep.valid:
            raise TopologyError("invalid topology: " + "; ".join(rep.violations))
        return rep.inverse


@dataclass
class TopologyReport:
    violations: List[str] = field(default_factory=list)
    inverse: Optional[np.ndarray] = None

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "violations": list(self.violations),
            "inverse": self.inverse.tolist() if self.inverse is not None else None,
        }


def _derive_paths(r: np.ndarray) -> List[Tuple[int, ...]]:
    m = r.shape[0]
    has_incoming = r.sum(axis=0) > 0
    paths = []
    for start in range(m):
        if has_incoming[start]:
            continue
        path = [start]
        seen = {start}
        cur = start
        while True:
            nxt = np.flatnonzero(r[cur])
            if len(nxt) != 1 or int(nxt[0]) in seen:
                break
            cur = int(nxt[0])
            seen.add(cur)
            path.append(cur)
        paths.append(tuple(path))
    return paths


def validate_topology(t: NetworkTopology) -> TopologyReport:
    """
    Check the routing invariants; violations are reported, never raised

    Returns:
        TopologyReport with the violation list and (I - R)^{-1} when valid
    """
    report = TopologyReport()
    r = t.routing
    m = t.m_virtual

    if not np.isin(r, (0, 1)).all():
        report.violations.append("routing entries must be 0 or 1")

    for row in range(m):
        targets = np.flatnonzero(r[row])
        if len(targets) > 1:
            report.violations.append(
                f"forking: queue {row} routes to {targets.tolist()}"
            )

    graph = nx.DiGraph()
    graph.add_nodes_from(range(m))
    graph.add_edges_from(zip(*np.nonzero(r)))
    if not nx.is_directed_acyclic_graph(graph):
        cycle = [int(u) for u, _ in nx.find_cycle(graph)]
        report.violations.append(f"non-nilpotent routing: cycle through {cycle}")

    if len(t.pq_map) != m:
        report.violations.append(
            f"physical map covers {len(t.pq_map)} queues, expected {m}"
        )

    for flow in t.flows:
        if not flow.path:
            report.violations.append(f"flow {flow.index} has an empty path")
            continue
        if any(q < 0 or q >= m for q in flow.path):
            report.violations.append(f"flow {flow.index} references unknown queues")
            continue
        for a, b in zip(flow.path, flow.path[1:]):
            if r[a, b] != 1:
                report.violations.append(
                    f"flow {flow.index} path step {a}->{b} not in routing matrix"
                )

    if report.valid:
        # nilpotent: the geometric series stops within M terms
        inverse = np.eye(m, dtype=np.int64)
        power = np.eye(m, dtype=np.int64)
        for _ in range(m):
            power = power @ r
            if not power.any():
                break
            inverse = inverse + power
        report.inverse = inverse
    return report


def step(
    x: np.ndarray,
    a: np.ndarray,
    d: np.ndarray,
    t: NetworkTopology,
    slot: Optional[int] = None,
) -> np.ndarray:
    """
    Advance the queue state by one slot: x' = x + a - d(I - R)

    Raises:
        InfeasibleDepartureError: d exceeds x in some component
    """
    if np.any(d > x):
        bad = np.flatnonzero(d > x).tolist()
        raise InfeasibleDepartureError(
            f"departure {d.tolist()} exceeds state {x.tolist()} at queues {bad}", slot
        )
    if np.any(a < 0):
        raise ConfigError(f"negative arrival vector {a.tolist()}")
    if t.is_single_hop:
        return x + a - d
    return x + a - d @ t.transfer


def workload(lam: Sequence[float], t: NetworkTopology) -> np.ndarray:
    """W = Lambda (I - R)^{-1}"""
    return np.asarray(lam, dtype=float) @ t.inverse()
