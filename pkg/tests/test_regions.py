import numpy as np
import pytest

from qnetlab.errors import EnumerationLimitError, RegionError
from qnetlab.regions import (
    ContentionGraph,
    DepartureRegion,
    build_region,
    conflict_matrix,
    feasible_candidates,
    independent_set_region,
    switch_region,
    switch_vertex_count,
    truncate,
)


def test_switch2_vertices_in_order(switch2):
    assert switch2.vertices.tolist() == [
        [0, 0, 0, 0],
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [1, 0, 0, 1],
        [0, 1, 1, 0],
    ]
    assert switch2.zero_id == 0
    assert switch2.max_departure == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_switch_vertex_count_matches_enumeration(n):
    region = switch_region(n)
    assert len(region) == switch_vertex_count(n)
    # every vertex serves each input and output at most once
    mats = region.vertices.reshape(-1, n, n)
    assert mats.sum(axis=1).max() <= 1
    assert mats.sum(axis=2).max() <= 1


def test_switch_enumeration_guard():
    with pytest.raises(EnumerationLimitError):
        switch_region(7)


def test_path4_independent_sets(path4):
    sets = {tuple(v) for v in path4.vertices.tolist()}
    assert len(path4) == 8
    assert (1, 0, 1, 0) in sets and (1, 0, 0, 1) in sets
    assert (1, 1, 0, 0) not in sets
    assert path4.vertices[0].tolist() == [0, 0, 0, 0]


def test_contention_graph_validation():
    with pytest.raises(RegionError):
        ContentionGraph(3, ((0, 0),))
    with pytest.raises(RegionError):
        ContentionGraph(3, ((0, 3),))
    with pytest.raises(EnumerationLimitError):
        independent_set_region(ContentionGraph.path(25))


def test_region_requires_zero_vector():
    with pytest.raises(RegionError):
        DepartureRegion(np.array([[1, 0], [0, 1]]))


def test_region_rejects_negative_and_duplicate_vertices():
    with pytest.raises(RegionError):
        DepartureRegion(np.array([[0, 0], [-1, 0]]))
    with pytest.raises(RegionError):
        DepartureRegion(np.array([[0, 0], [1, 0], [1, 0]]))


def test_region_vertices_are_read_only(switch2):
    with pytest.raises(ValueError):
        switch2.vertices[1, 0] = 5


def test_truncation_dedups_and_keeps_lowest_id(switch2):
    x = np.array([1, 0, 0, 0])
    assert truncate(switch2.vertices[5], x).tolist() == [1, 0, 0, 0]
    candidates = feasible_candidates(switch2, x)
    assert [(c.vector.tolist(), c.vertex_id) for c in candidates] == [
        ([0, 0, 0, 0], 0),
        ([1, 0, 0, 0], 1),
    ]


def test_build_region_drop_for_degraded_switch():
    region = build_region("degraded", {"preset": "switch", "ports": 2, "drop": [[0, 1, 1, 0]]})
    assert len(region) == 6
    assert [0, 1, 1, 0] not in region.vertices.tolist()
    with pytest.raises(RegionError):
        build_region("bad", {"preset": "switch", "ports": 2, "drop": [[0, 0, 0, 0]]})


def test_build_region_explicit_and_unknown():
    region = build_region("custom", {"vertices": [[0, 0], [2, 0], [0, 1]]})
    assert region.label == "custom" and len(region) == 3
    with pytest.raises(RegionError):
        build_region("bad", {"preset": "hypercube"})


def test_conflict_matrix_path_graph_is_identity_plus_adjacency(path4):
    adjacency = np.zeros((4, 4))
    for i in range(3):
        adjacency[i, i + 1] = adjacency[i + 1, i] = 1
    assert np.array_equal(conflict_matrix(path4), np.eye(4) + adjacency)


def test_conflict_matrix_switch_links_shared_ports(switch2):
    p = conflict_matrix(switch2)
    # VOQ (0,0) shares input 0 with (0,1) and output 0 with (1,0), never (1,1)
    assert p[0].tolist() == [1, 1, 1, 0]
    assert np.array_equal(p, p.T)
