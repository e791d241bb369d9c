import json

import numpy as np
import pytest
import yaml

from qnetlab.capacity import INADMISSIBLE, STRICT
from qnetlab.cli import EXIT_CONFIG, EXIT_OK, main, parse_grid
from qnetlab.errors import ConfigError, PolicyConfigError, RegionError, TopologyError
from qnetlab.harness.output import csv_header
from qnetlab.harness import (
    EXPERIMENT_PRESETS,
    apply_overrides,
    experiment_from_dict,
    list_presets,
    load_experiment,
    preset_config,
    run_experiment,
    simulate,
    sweep,
    validate_cmd,
)
from qnetlab.model import replication_streams
from qnetlab.stability import STABLE, UNSTABLE


def build(cfg):
    return experiment_from_dict(cfg)


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------

def test_config_defaults(switch_config):
    exp = build(switch_config())
    assert exp.m == 4
    assert exp.topology.is_single_hop
    assert exp.horizon == 4000
    assert exp.warmup == 400
    assert exp.initial_backlog.tolist() == [0, 0, 0, 0]
    assert [r.label for r in exp.region_list] == ["switch"]
    assert exp.policy.describe() == "max_scalar(sum_scalar(pow(1)))"


def test_config_digest_tracks_the_raw_config(switch_config):
    a = build(switch_config())
    b = build(switch_config())
    c = build(switch_config(seed=4))
    assert a.digest == b.digest
    assert a.digest != c.digest


@pytest.mark.parametrize(
    "change, error",
    [
        ({"policy": "max_scalar(nope)"}, ConfigError),
        ({"horizon": 0}, ConfigError),
        ({"horizon": "many"}, ConfigError),
        ({"warmup_fraction": 1.0}, ConfigError),
        ({"initial_backlog": [1, 2, 3]}, ConfigError),
        ({"initial_backlog": [1, -2, 3, 0]}, ConfigError),
        ({"constraints": {"regions": {"r": {"preset": "hexagon"}}}}, RegionError),
        ({"constraints": {"regions": {"r": {"preset": "switch", "ports": 3}}}}, ConfigError),
        ({"topology": {"routing": [[0, 1], [0, 0]]}}, TopologyError),
    ],
)
def test_config_errors(switch_config, change, error):
    with pytest.raises(error):
        build(switch_config(**change))


def test_config_missing_sections(switch_config):
    cfg = switch_config()
    del cfg["arrivals"]
    with pytest.raises(ConfigError):
        build(cfg)
    with pytest.raises(ConfigError):
        build([1, 2])


def test_static_memory_rejects_modulated_constraints(switch_config):
    cfg = switch_config(policy="memory(sum_scalar(pow(1.0)))")
    cfg["constraints"] = {
        "regions": {
            "full": {"preset": "switch", "ports": 2},
            "degraded": {"preset": "switch", "ports": 2, "drop": [[0, 1, 1, 0]]},
        },
        "states": ["full", "degraded"],
        "chain": {"transition": [[0.5, 0.5], [0.5, 0.5]]},
    }
    with pytest.raises(PolicyConfigError):
        build(cfg)
    cfg["policy"] = "memory_dyn(sum_scalar(pow(1.0)))"
    assert build(cfg).constraints.n_states == 2


def test_several_regions_need_a_state_list(switch_config):
    cfg = switch_config()
    cfg["constraints"]["regions"]["other"] = {"preset": "switch", "ports": 2}
    with pytest.raises(ConfigError):
        build(cfg)


def test_overrides_do_not_touch_the_input(switch_config):
    cfg = switch_config()
    out = apply_overrides(cfg, seed=9, slots=100, replications=2, out="runs/x")
    assert (out["seed"], out["horizon"], out["replications"]) == (9, 100, 2)
    assert out["output"]["dir"] == "runs/x"
    assert cfg["seed"] == 3 and "output" not in cfg


def test_load_experiment_from_yaml(tmp_path, switch_config):
    path = tmp_path / "exp.yaml"
    path.write_text(yaml.safe_dump(switch_config()))
    exp = load_experiment(path, slots=1234)
    assert exp.horizon == 1234
    bad = tmp_path / "bad.yaml"
    bad.write_text("arrivals: [unclosed")
    with pytest.raises(ConfigError):
        load_experiment(bad)


def test_presets_parse():
    names = [p["name"] for p in list_presets()]
    assert names == list(EXPERIMENT_PRESETS)
    for name in names:
        exp = build(preset_config(name))
        assert exp.horizon == 1_000_000
    with pytest.raises(ConfigError):
        preset_config("nope")


def test_preset_config_is_a_copy():
    cfg = preset_config("switch2-base")
    cfg["seed"] = 99
    assert EXPERIMENT_PRESETS["switch2-base"]["seed"] == 1


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------

def test_simulation_is_deterministic_per_seed(switch_config):
    exp = build(switch_config(horizon=2000, replications=2))
    first = [simulate(exp, s) for s in replication_streams(exp.seed, 2)]
    again = [simulate(exp, s) for s in replication_streams(exp.seed, 2)]
    for a, b in zip(first, again):
        assert np.array_equal(a.states, b.states)
        assert np.array_equal(a.vertex_ids, b.vertex_ids)
    assert not np.array_equal(first[0].states, first[1].states)


def test_simulation_keeps_queues_nonnegative_and_feasible(switch_config):
    exp = build(switch_config(horizon=3000))
    res = simulate(exp, replication_streams(exp.seed, 1)[0])
    assert res.states.shape == (3001, 4)
    assert res.states.min() >= 0
    assert res.vertex_ids.min() >= 0
    assert res.vertex_ids.max() < len(exp.region_list[0])


def test_simulation_follows_the_modulating_chain():
    exp = build(preset_config("memory-dynamic-switch2") | {"horizon": 5000, "replications": 1})
    res = simulate(exp, replication_streams(exp.seed, 1)[0])
    # stationary law of [[0.9, 0.1], [0.2, 0.8]]
    assert res.s_d.mean() == pytest.approx(1 / 3, abs=0.08)
    assert res.certificate is not None


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

def test_run_summary(switch_config):
    summary = run_experiment(build(switch_config(replications=2)), write=False)
    assert len(summary.replications) == 2
    assert summary.admissibility.verdict == STRICT
    merged = summary.merged
    assert merged["mean_backlog"] > 0
    assert len(merged["moments"]) == 4
    assert merged["verdicts"] == [r.classification for r in summary.replications]
    out = summary.to_dict()
    assert out["schema"] == 1
    assert out["policy"] == "max_scalar(sum_scalar(pow(1)))"
    assert summary.output_dir is None


def test_run_refuses_an_unvalidated_potential(switch_config):
    with pytest.raises(ConfigError):
        run_experiment(build(switch_config(policy="max_scalar(linear)", horizon=500)), write=False)
    summary = run_experiment(
        build(switch_config(policy="max_scalar(linear)", horizon=500, allow_unvalidated=True)), write=False
    )
    assert not summary.validity.valid


def test_run_writes_reproducible_outputs(tmp_path, switch_config):
    cfg = switch_config(horizon=1000, record={"sample_every": 10}, output={"dir": str(tmp_path / "run")})
    first = run_experiment(build(cfg))
    assert first.output_dir == tmp_path / "run"
    csv = (first.output_dir / "rep_0.csv").read_text().splitlines()
    assert csv[0] == csv_header(4) == "slot,l1,l2,q_0,q_1,q_2,q_3,vertex_id,s_d"
    assert len(csv) == 1 + 100
    assert csv[1].startswith("0,0,0.000000,0,0,0,0,")
    summary_bytes = (first.output_dir / "summary.json").read_bytes()
    assert json.loads(summary_bytes)["config_digest"] == first.config_digest
    assert "total_seconds" in json.loads((first.output_dir / "timing.json").read_text())

    run_experiment(build(cfg))
    assert (first.output_dir / "summary.json").read_bytes() == summary_bytes


def test_sweep_rows(switch_config):
    rows = sweep(build(switch_config(horizon=2000)), [0.5, 1.3, 3.0])
    low, high, broken = rows
    assert low.verdict == STRICT
    assert low.margin == pytest.approx(0.5 / 0.225 - 1, abs=1e-9)
    assert high.verdict == INADMISSIBLE
    assert broken.error and broken.verdict is None
    with pytest.raises(ConfigError):
        sweep(build(switch_config()), [])


def test_validate_warns_on_overload(switch_config):
    report = validate_cmd(build(switch_config(rate=0.6)))
    assert report.exit_code == 0
    assert report.warnings
    assert report.to_dict()["admissibility"]["verdict"] == INADMISSIBLE


def test_validate_fails_on_an_invalid_potential(switch_config):
    report = validate_cmd(build(switch_config(policy="max_scalar(linear)")))
    assert report.exit_code == 1
    assert not report.to_dict()["potential"]["valid"]


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def test_parse_grid():
    assert parse_grid("0.5, 0.9,1.1") == [0.5, 0.9, 1.1]
    for bad in ["", "a,b", "0.5,-1"]:
        with pytest.raises(ConfigError):
            parse_grid(bad)


def test_cli_presets_list(capsys):
    assert main(["presets", "list"]) == EXIT_OK
    assert "switch2-base" in capsys.readouterr().out


def test_cli_needs_a_source():
    assert main(["run", "--quiet"]) == EXIT_CONFIG


def test_cli_capacity(capsys):
    assert main(["capacity", "--preset", "switch2-overload", "--quiet"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "verdict: inadmissible" in out


def test_cli_run_and_validate(tmp_path, capsys, switch_config):
    path = tmp_path / "exp.yaml"
    path.write_text(yaml.safe_dump(switch_config()))
    code = main(["run", "--config", str(path), "--slots", "800", "--out", str(tmp_path / "out"), "--quiet"])
    assert code == EXIT_OK
    assert (tmp_path / "out" / "summary.json").exists()
    assert "mean_backlog" in capsys.readouterr().out
    assert main(["validate", "--config", str(path), "--quiet"]) == EXIT_OK


def test_cli_bad_grid():
    assert main(["sweep", "--preset", "switch2-light", "--slots", "500", "--grid", "x", "--quiet"]) == EXIT_CONFIG


# ---------------------------------------------------------------------------
# reduced-horizon acceptance runs
# ---------------------------------------------------------------------------

@pytest.mark.acceptance
def test_stable_load_is_classified_stable():
    exp = build(apply_overrides(preset_config("switch2-light"), slots=20000, replications=1))
    assert run_experiment(exp, write=False).classification == STABLE


@pytest.mark.acceptance
def test_overload_is_classified_unstable():
    exp = build(apply_overrides(preset_config("switch2-overload"), slots=20000, replications=1))
    summary = run_experiment(exp, write=False)
    assert summary.admissibility.verdict == INADMISSIBLE
    assert summary.classification == UNSTABLE
    assert summary.merged["slope"] > 0.05


@pytest.mark.acceptance
def test_drift_is_negative_far_from_the_origin():
    cfg = preset_config("switch2-base") | {
        "horizon": 8000,
        "replications": 1,
        "initial_backlog": [200] * 4,
        "warmup_fraction": 0.0,
    }
    summary = run_experiment(build(cfg), write=False)
    top = summary.merged["drift"]["top_bin"]
    assert top is not None
    assert top["mean"] < 0
    assert top["ci95"][1] < 0


@pytest.mark.acceptance
def test_memory_policy_certificate_holds():
    exp = build(apply_overrides(preset_config("memory-switch2"), slots=5000, replications=1))
    summary = run_experiment(exp, write=False)
    cert = summary.replications[0].certificate
    assert cert is not None
    assert cert["violations"] == 0


@pytest.mark.acceptance
@pytest.mark.parametrize("preset", ["pcs-path4", "lpf-switch2", "stale-switch2", "frame-switch2"])
def test_policy_presets_are_stable_inside_capacity(preset):
    exp = build(apply_overrides(preset_config(preset), slots=20000, replications=1))
    summary = run_experiment(exp, write=False)
    assert summary.admissibility.verdict == STRICT
    assert summary.classification == STABLE


@pytest.mark.acceptance
def test_dynamic_memory_preset_is_stable_with_a_clean_certificate():
    # the modulated load needs a longer horizon before the slope settles
    exp = build(apply_overrides(preset_config("memory-dynamic-switch2"), slots=100000, replications=1))
    summary = run_experiment(exp, write=False)
    assert summary.admissibility.verdict == STRICT
    assert summary.classification == STABLE
    cert = summary.replications[0].certificate
    assert cert is not None
    assert cert["violations"] == 0


def single_queue(batches, horizon, **extra):
    cfg = {
        "name": "single-queue",
        "arrivals": {"states": [{"batches": [batches]}]},
        "constraints": {"regions": {"server": {"vertices": [[0], [1]]}}},
        "policy": "max_scalar(sum_scalar(pow(1.0)))",
        "horizon": horizon,
        "seed": 5,
    }
    cfg.update(extra)
    return build(cfg)


def test_zero_arrivals_keep_the_network_empty(switch_config):
    summary = run_experiment(build(switch_config(rate=0.0, horizon=10)), write=False)
    assert summary.merged["mean_backlog"] == 0.0
    assert summary.replications[0].notes
    assert summary.admissibility.unbounded


@pytest.mark.acceptance
def test_overloaded_single_queue_grows_at_the_excess_rate():
    exp = single_queue({"values": [1, 2], "probs": [0.8, 0.2]}, 20000)
    summary = run_experiment(exp, write=False)
    assert summary.merged["slope"] == pytest.approx(0.2, abs=0.02)
    assert summary.classification == UNSTABLE


@pytest.mark.acceptance
def test_single_queue_drift_matches_the_service_surplus():
    exp = single_queue(
        {"values": [0, 1], "probs": [0.6, 0.4]}, 2000,
        initial_backlog=[300], warmup_fraction=0.0,
    )
    summary = run_experiment(exp, write=False)
    top = summary.merged["drift"]["top_bin"]
    # dL / x ~ E[a - d] = 0.4 - 1 far from the origin
    assert top["normalized_mean"] == pytest.approx(-0.6, abs=0.15)
