import numpy as np
import pytest

from qnetlab.errors import ConfigError, InsufficientDataError
from qnetlab.potentials import parse_potential
from qnetlab.stability import (
    INCONCLUSIVE,
    STABLE,
    UNSTABLE,
    MomentAccumulator,
    SlopeConfig,
    StatsRecorder,
    drift_edges,
    drift_profile,
    moment_report,
    regeneration_moments,
    slope_test,
)

QUADRATIC = parse_potential("sum_scalar(pow(1.0))")


def draining(start: int = 1000) -> np.ndarray:
    """One queue losing a packet per slot: X_t = start - t"""
    return np.arange(start, 0, -1)[:, None]


# ---------------------------------------------------------------------------
# recorder and moments
# ---------------------------------------------------------------------------

def test_accumulator_means():
    acc = MomentAccumulator(2)
    acc.update(np.array([3.0, 4.0]))
    assert acc.count == 2
    assert acc.means() == pytest.approx([3.5, 12.5])


def test_accumulator_merge_is_associative(rng):
    parts = []
    for _ in range(3):
        acc = MomentAccumulator(3)
        acc.update(rng.random(50) * 10)
        parts.append(acc)
    a, b, c = parts
    left = a.merge(b).merge(c)
    right = a.merge(b.merge(c))
    assert left.count == right.count == 150
    assert np.allclose(left.sums, right.sums)
    with pytest.raises(ConfigError):
        a.merge(MomentAccumulator(2))


def test_recorder_keeps_the_stride_and_skips_warmup_in_moments():
    states = np.arange(10)[:, None] * np.array([[1, 0]])
    rec = StatsRecorder.from_trajectory(states, sample_every=3, moments=2, warmup=4)
    assert rec.times.tolist() == [0, 3, 6, 9]
    assert rec.l1.tolist() == [0.0, 3.0, 6.0, 9.0]
    # only t = 6 and t = 9 reach the accumulator
    assert rec.acc.count == 2
    assert rec.acc.means()[0] == pytest.approx(7.5)


def test_recorder_single_slot_record():
    rec = StatsRecorder(sample_every=2)
    rec.record(1, np.array([5, 5]))
    rec.record(2, np.array([3, 4]))
    assert rec.times.tolist() == [2]
    assert rec.l2.tolist() == [5.0]


def test_recorder_rejects_bad_settings():
    with pytest.raises(ConfigError):
        StatsRecorder(sample_every=0)
    with pytest.raises(ConfigError):
        StatsRecorder(moments=0)


def test_moment_report_bounded_for_a_constant_backlog():
    states = np.full((500, 2), 7)
    rec = StatsRecorder.from_trajectory(states, moments=2)
    report = moment_report(rec, 2)
    assert report.average == pytest.approx(98.0)
    assert report.ratio == pytest.approx(1.0)
    assert report.bounded


def test_moment_report_flags_growth():
    rec = StatsRecorder.from_trajectory(np.arange(1000)[:, None], moments=1)
    report = moment_report(rec, 1)
    assert report.ratio == pytest.approx(499.5 / 249.5)
    assert not report.bounded
    with pytest.raises(ConfigError):
        moment_report(rec, 2)


# ---------------------------------------------------------------------------
# slope test
# ---------------------------------------------------------------------------

def test_slope_stable_for_stationary_noise(rng):
    series = 5.0 + rng.normal(0.0, 1.0, 4000)
    res = slope_test(series)
    assert res.classification == STABLE
    assert res.windows == 50


def test_slope_unstable_for_linear_growth():
    t = np.arange(0, 20000, 10)
    res = slope_test(0.05 * t, times=t)
    assert res.slope == pytest.approx(0.05)
    assert res.classification == UNSTABLE


def test_slope_between_thresholds_is_inconclusive():
    res = slope_test(0.005 * np.arange(2000))
    assert res.classification == INCONCLUSIVE


def test_slope_thresholds_from_config():
    cfg = SlopeConfig.from_dict({"stable": 0.01, "windows": 10})
    res = slope_test(0.005 * np.arange(2000), cfg)
    assert res.classification == STABLE
    assert res.windows == 10


def test_slope_needs_enough_points():
    with pytest.raises(InsufficientDataError):
        slope_test(np.ones(50))


# ---------------------------------------------------------------------------
# drift profile
# ---------------------------------------------------------------------------

def test_drift_edges_are_geometric_and_increasing():
    edges = drift_edges(1000.0, 10)
    assert edges[0] == pytest.approx(1.0)
    assert edges[-1] == pytest.approx(1000.0)
    assert np.all(np.diff(edges) > 0)
    assert drift_edges(0.0, 4)[-1] == pytest.approx(2.0)


def test_drift_negative_for_a_draining_queue():
    profile = drift_profile(draining(), QUADRATIC)
    top = profile.top_bin()
    assert top is not None and top.count >= profile.min_count
    assert top.mean < 0
    # dL = -x + 1/2 and |grad| = x, so the normalized drift is close to -1
    assert top.normalized_mean == pytest.approx(-1.0, abs=0.01)
    assert top.ci95[1] < 0
    start = profile.negative_from()
    assert start is not None
    assert all(b.mean < 0 for b in profile.bins[start:] if b.count >= profile.min_count)


def test_drift_hessian_column():
    profile = drift_profile(draining(), QUADRATIC, with_hessian=True)
    populated = [b for b in profile.bins if b.count]
    assert populated
    for b in populated:
        assert b.hessian_norm == pytest.approx(1.0)


def test_drift_merge_pools_bins():
    states = draining()
    profile = drift_profile(states, QUADRATIC)
    merged = profile.merge(profile)
    top = profile.top_bin()
    mtop = merged.top_bin()
    x = states[:-1, 0].astype(float)
    d = -x[x >= top.lo] + 0.5
    pooled = np.concatenate([d, d])
    assert mtop.count == 2 * top.count == pooled.size
    assert mtop.mean == pytest.approx(pooled.mean())
    assert mtop.se == pytest.approx(pooled.std(ddof=1) / np.sqrt(pooled.size))


def test_drift_merge_needs_shared_edges():
    a = drift_profile(draining(), QUADRATIC)
    b = drift_profile(draining(800), QUADRATIC)
    with pytest.raises(ValueError):
        a.merge(b)


def test_drift_needs_enough_transitions():
    with pytest.raises(InsufficientDataError):
        drift_profile(draining(50), QUADRATIC)


def test_drift_profile_to_dict_reports_empty_bins():
    out = drift_profile(draining(), QUADRATIC).to_dict()
    assert len(out["edges"]) == 21
    assert len(out["bins"]) == 20
    assert out["top_bin"]["mean"] < 0
    assert all(out["bins"][i]["count"] == 0 for i in out["empty_bins"])


# ---------------------------------------------------------------------------
# regeneration
# ---------------------------------------------------------------------------

def test_regeneration_gaps_of_a_periodic_chain():
    states = np.tile([0, 1, 2], 100)
    log = regeneration_moments(states, 0)
    assert log.visits == 100
    assert log.mean_gap == pytest.approx(3.0)
    assert log.second_moment == pytest.approx(9.0)
    assert log.variance == pytest.approx(0.0)
    assert log.ci95 == pytest.approx([3.0, 3.0])


def test_regeneration_random_chain_mean_gap(rng):
    # i.i.d. uniform over 4 states: geometric gaps with mean 4
    states = rng.integers(0, 4, 40000)
    log = regeneration_moments(states, 2)
    assert log.mean_gap == pytest.approx(4.0, rel=0.05)
    assert log.ci95[0] < log.mean_gap < log.ci95[1]


def test_regeneration_needs_visits():
    with pytest.raises(InsufficientDataError):
        regeneration_moments(np.zeros(100, dtype=int), 5)
    with pytest.raises(InsufficientDataError):
        regeneration_moments(np.tile([0, 1, 2], 10), 0)


def test_regeneration_two_state_chain_mean_return_time(rng):
    p = np.array([[0.9, 0.1], [0.2, 0.8]])
    states = np.empty(30000, dtype=int)
    s = 0
    for t, u in enumerate(rng.random(states.size)):
        states[t] = s
        s = int(u >= p[s, 0])
    log = regeneration_moments(states, 0)
    # 1 / pi_0 with pi_0 = 2/3
    assert log.mean_gap == pytest.approx(1.5, abs=0.05)


def test_moments_of_an_all_zero_trajectory():
    rec = StatsRecorder.from_trajectory(np.zeros((200, 3), dtype=int), moments=3)
    for h in (1, 2, 3):
        report = moment_report(rec, h)
        assert report.average == 0.0
        assert report.bounded


def test_first_moment_is_the_mean_norm(rng):
    states = rng.integers(0, 10, (300, 3))
    rec = StatsRecorder.from_trajectory(states, moments=2)
    assert moment_report(rec, 1).average == pytest.approx(np.linalg.norm(states, axis=1).mean())


def test_idle_system_has_zero_drift():
    profile = drift_profile(np.zeros((500, 2), dtype=int), QUADRATIC)
    populated = [b for b in profile.bins if b.count]
    assert sum(b.count for b in populated) == 499
    assert all(b.mean == 0.0 for b in populated)
