"""
Region presets: input-queued switch matchings and contention-graph independent sets
"""
import itertools
from dataclasses import dataclass
from functools import cached_property
from math import comb, factorial
from typing import Any, Dict, Sequence, Tuple

import networkx as nx
import numpy as np

from ..errors import EnumerationLimitError, RegionError
from .region import DepartureRegion

MAX_SWITCH_PORTS = 6
MAX_GRAPH_VERTICES = 24

REGION_PRESETS = {
    "switch": "sub-permutation matrices of an n x n input-queued switch (VOQ (i,j) at index i*n+j)",
    "contention_graph": "indicator vectors of the independent sets of a contention graph",
}


@dataclass(frozen=True)
class ContentionGraph:
    n_vertices: int
    edges: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        for u, v in self.edges:
            if u == v:
                raise RegionError(f"contention graph has a self-loop on {u}")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise RegionError(f"edge ({u}, {v}) outside 0..{self.n_vertices - 1}")

    @classmethod
    def path(cls, n: int) -> "ContentionGraph":
        return cls(n, tuple((i, i + 1) for i in range(n - 1)))

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n_vertices))
        g.add_edges_from(self.edges)
        return g


def switch_vertex_count(n: int) -> int:
    return sum(comb(n, k) ** 2 * factorial(k) for k in range(n + 1))


def switch_region(n: int, label: str = None) -> DepartureRegion:
    """
    All n x n sub-permutation matrices, flattened row-major, zero first

    Raises:
        EnumerationLimitError: n exceeds MAX_SWITCH_PORTS
    """
    if n < 1:
        raise RegionError(f"switch needs at least one port, got {n}")
    if n > MAX_SWITCH_PORTS:
        raise EnumerationLimitError(
            f"switch with {n} ports exceeds the enumeration guard ({MAX_SWITCH_PORTS})"
        )
    vertices = []
    for k in range(n + 1):
        for rows in itertools.combinations(range(n), k):
            for cols in itertools.permutations(range(n), k):
                v = np.zeros(n * n, dtype=np.int64)
                for i, j in zip(rows, cols):
                    v[i * n + j] = 1
                vertices.append(v)
    return DepartureRegion(np.array(vertices), label or f"switch{n}", d_max=1)


def independent_set_region(g: ContentionGraph, label: str = None) -> DepartureRegion:
    """
    Indicator vectors of every independent set (empty set first, then by size)

    Raises:
        EnumerationLimitError: more than MAX_GRAPH_VERTICES vertices
    """
    if g.n_vertices > MAX_GRAPH_VERTICES:
        raise EnumerationLimitError(
            f"contention graph with {g.n_vertices} vertices exceeds the enumeration "
            f"guard ({MAX_GRAPH_VERTICES})"
        )
    vertices = [np.zeros(g.n_vertices, dtype=np.int64)]
    # independent sets of G are the cliques of its complement
    for clique in nx.enumerate_all_cliques(nx.complement(g.graph)):
        v = np.zeros(g.n_vertices, dtype=np.int64)
        v[list(clique)] = 1
        vertices.append(v)
    return DepartureRegion(np.array(vertices), label or "contention_graph", d_max=1)


def build_region(label: str, spec: Dict[str, Any]) -> DepartureRegion:
    """
    Region from its config declaration: a preset or an explicit vertex list

    Args:
        label: region name in the config
        spec: {"preset": "switch", "ports": n} | {"preset": "contention_graph",
              "vertices": n, "edges": [...]} | {"vertices": [[...], ...]}; an optional
              "drop" list removes vertices
    """
    preset = spec.get("preset")
    if preset == "switch":
        region = switch_region(int(spec.get("ports", 2)), label)
    elif preset == "contention_graph":
        edges: Sequence = spec.get("edges", [])
        n = spec.get("vertices")
        if n is None:
            n = 1 + max((max(e) for e in edges), default=-1)
        graph = ContentionGraph(int(n), tuple((int(u), int(v)) for u, v in edges))
        region = independent_set_region(graph, label)
    elif preset is None and "vertices" in spec:
        region = DepartureRegion(np.asarray(spec["vertices"]), label, spec.get("d_max"))
    else:
        raise RegionError(
            f"region '{label}': unknown preset {preset!r} (known: {', '.join(REGION_PRESETS)})"
        )
    if spec.get("drop"):
        region = region.without(spec["drop"], label)
    return region
