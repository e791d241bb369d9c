import numpy as np
import pytest

from qnetlab.capacity import (
    BOUNDARY,
    INADMISSIBLE,
    STRICT,
    TwoPhaseSimplex,
    check_admissible,
)
from qnetlab.errors import ConfigError
from qnetlab.model import ConstraintProcess, FiniteMarkovChain, NetworkTopology
from qnetlab.regions import build_region


def static(label="r"):
    return ConstraintProcess.static(label)


# ---------------------------------------------------------------------------
# simplex
# ---------------------------------------------------------------------------

def test_simplex_small_lp():
    # max x + y  s.t.  x + 2y + s1 = 4,  3x + y + s2 = 6
    c = np.array([1.0, 1.0, 0.0, 0.0])
    a = np.array([[1.0, 2.0, 1.0, 0.0], [3.0, 1.0, 0.0, 1.0]])
    res = TwoPhaseSimplex().solve(c, a, np.array([4.0, 6.0]))
    assert res.optimal
    assert res.objective == pytest.approx(2.8)
    assert res.x[:2] == pytest.approx([1.6, 1.2])


def test_simplex_infeasible():
    # x + y = 1 and x + y = 2
    res = TwoPhaseSimplex().solve(np.array([1.0, 0.0]), np.array([[1.0, 1.0], [1.0, 1.0]]), np.array([1.0, 2.0]))
    assert res.status == "infeasible"


def test_simplex_unbounded():
    # max x  s.t.  x - y = 0
    res = TwoPhaseSimplex().solve(np.array([1.0, 0.0]), np.array([[1.0, -1.0]]), np.array([0.0]))
    assert res.status == "unbounded"


def test_simplex_redundant_rows_and_ge_rows():
    # max -x - y  s.t.  x + y = 2 (twice), x >= 0.5
    res = TwoPhaseSimplex().solve(
        np.array([-1.0, -1.0]),
        np.array([[1.0, 1.0], [2.0, 2.0]]),
        np.array([2.0, 4.0]),
        np.array([[1.0, 0.0]]),
        np.array([0.5]),
    )
    assert res.optimal
    assert res.objective == pytest.approx(-2.0)
    assert res.x[0] >= 0.5 - 1e-12


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("rate, margin", [(0.4, 0.25), (0.45, 0.5 / 0.45 - 1), (0.495, 0.5 / 0.495 - 1)])
def test_switch_uniform_load_margin(switch2, single_hop4, rate, margin):
    res = check_admissible([rate] * 4, single_hop4, static(), [switch2])
    assert res.verdict == STRICT
    assert res.margin == pytest.approx(margin, abs=1e-9)


def test_switch_overload_is_inadmissible(switch2, single_hop4):
    res = check_admissible([0.6] * 4, single_hop4, static(), [switch2])
    assert res.verdict == INADMISSIBLE and not res.admissible
    assert res.margin == pytest.approx(-1 / 6, abs=1e-9)


def test_switch_boundary_load(switch2, single_hop4):
    res = check_admissible([0.5] * 4, single_hop4, static(), [switch2])
    assert res.verdict == BOUNDARY
    assert res.admissible


def test_path_graph_uniform_margin(path4, single_hop4):
    rate = 0.5 / 1.1
    res = check_admissible([rate] * 4, single_hop4, static(), [path4])
    assert res.margin == pytest.approx(0.1, abs=1e-9)


def test_zero_workload_is_unbounded(switch2, single_hop4):
    res = check_admissible([0.0] * 4, single_hop4, static(), [switch2])
    assert res.verdict == STRICT and res.unbounded
    assert res.to_dict()["margin"] is None


def test_witness_reconstructs_scaled_workload(switch2, single_hop4):
    lam = np.array([0.3, 0.1, 0.15, 0.25])
    res = check_admissible(lam, single_hop4, static(), [switch2])
    for w in res.witness:
        assert np.all(w >= -1e-12)
        assert w.sum() == pytest.approx(1.0)
    assert np.allclose(res.reconstruct(), res.workload * (1 + res.margin), atol=1e-8)


def test_modulated_constraints_average_the_regions(switch2, single_hop4):
    degraded = build_region("degraded", {"preset": "switch", "ports": 2, "drop": [[0, 1, 1, 0]]})
    chain = FiniteMarkovChain(np.array([[0.9, 0.1], [0.2, 0.8]]))
    c = ConstraintProcess(chain, ("full", "degraded"))
    regions = {"full": switch2, "degraded": degraded}
    # slots in the full region make up for the matching the degraded state lost
    res = check_admissible([0.45] * 4, single_hop4, c, regions)
    assert res.pi == pytest.approx([2 / 3, 1 / 3])
    assert res.margin == pytest.approx(0.5 / 0.45 - 1, abs=1e-9)
    assert np.allclose(res.reconstruct(), res.workload * (1 + res.margin), atol=1e-8)


def test_tandem_uses_workload():
    t = NetworkTopology.from_routing([[0, 1], [0, 0]])
    region = build_region("r", {"vertices": [[0, 0], [1, 0], [0, 1]]})
    # W = [0.2, 0.2]: any feasible split serves at most 1 per slot in total
    res = check_admissible([0.2, 0.0], t, static(), [region])
    assert res.workload == pytest.approx([0.2, 0.2])
    assert res.margin == pytest.approx(1.5, abs=1e-9)


def test_dominance_matches_equality_for_downward_closed_regions(switch2, single_hop4):
    lam = [0.3, 0.1, 0.15, 0.25]
    eq = check_admissible(lam, single_hop4, static(), [switch2])
    ge = check_admissible(lam, single_hop4, static(), [switch2], dominance=True)
    assert ge.margin == pytest.approx(eq.margin, abs=1e-9)
    assert ge.dominance


def test_admissibility_is_monotone_in_the_load(switch2, single_hop4):
    rng = np.random.default_rng(17)
    for _ in range(30):
        lam = rng.random(4) * 0.6
        smaller = lam * rng.random(4)
        big = check_admissible(lam, single_hop4, static(), [switch2])
        small = check_admissible(smaller, single_hop4, static(), [switch2])
        if big.admissible:
            assert small.admissible
        assert small.margin >= big.margin - 1e-9


def test_region_count_must_match_constraint_states(switch2, single_hop4):
    with pytest.raises(ConfigError):
        check_admissible([0.1] * 4, single_hop4, static(), [switch2, switch2])
    with pytest.raises(ConfigError):
        check_admissible([0.1] * 4, single_hop4, static("missing"), {"r": switch2})
