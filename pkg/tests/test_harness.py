import io
import math

import numpy as np
import pytest

from ugv_backscatter import ScenarioConfig
from ugv_backscatter.harness import (
    CSV_COLUMNS,
    algorithms_for,
    paired_bootstrap,
    parse_sweep,
    run_experiment,
    run_trial,
    write_csv,
)
from ugv_backscatter.model import ConfigError
from ugv_backscatter.planner import plan


def test_csv_header_order():
    text = write_csv([])
    assert text.strip().split(",") == list(CSV_COLUMNS)


def test_row_count_and_fields():
    rows = run_experiment(ScenarioConfig(), trials=3, seed=1, mode="fd", algorithms=["so-fb", "rzf"])
    assert [r["algorithm"] for r in rows] == ["so-fb", "rzf"]
    r = rows[0]
    assert (r["K_star"], r["M"], r["L"], r["trials"]) == (3, 36, 8, 3)
    parts = ("mean_e_ugv_motion", "mean_e_reader_tx", "mean_e_ap_tx", "mean_e_circuit")
    assert r["mean_e_total"] == pytest.approx(sum(r[k] for k in parts))
    assert r["experiment_id"] == "fd-s1"


def test_parallel_matches_serial():
    kw = dict(trials=6, seed=4, mode="fd", algorithms=["so-fb", "mrc-mrt"], sweeps=[parse_sweep("L=8,16")])
    serial = write_csv(run_experiment(ScenarioConfig(), jobs=1, **kw))
    parallel = write_csv(run_experiment(ScenarioConfig(), jobs=3, **kw))
    assert serial == parallel


def test_empty_network_energy_is_motion_and_circuit():
    cfg = ScenarioConfig(tag_density=0.0)
    (row,) = run_experiment(cfg, trials=2, seed=0, mode="hd")
    hp = plan(cfg)
    assert row["I"] == 0
    assert row["mean_e_reader_tx"] == 0.0 and row["mean_e_ap_tx"] == 0.0
    expected_motion = (cfg.mobility_mu1 + cfg.mobility_mu2 * cfg.ugv_speed) * hp.motion_time
    assert row["mean_e_ugv_motion"] == pytest.approx(expected_motion)
    assert row["mean_e_circuit"] == pytest.approx(hp.block_length * (cfg.circuit_power_reader + cfg.circuit_power_ap))
    assert row["mean_e_total"] == pytest.approx(row["mean_e_ugv_motion"] + row["mean_e_circuit"])
    assert row["std_e_total"] == 0.0


def test_parse_sweep():
    assert parse_sweep("L=8,16") == ("antennas", [8.0, 16.0])
    assert parse_sweep("coverage_area=100") == ("coverage_area", [100.0])
    for bad in ("L", "L=", "nope=1", "L=a,b"):
        with pytest.raises(ConfigError):
            parse_sweep(bad)


def test_failed_point_keeps_batch_running():
    rows = run_experiment(ScenarioConfig(), trials=2, seed=0, mode="hd",
                          sweeps=[parse_sweep("theta=0,0.4")])
    bad, good = rows
    assert bad["sweep_value"] == "0.0" and bad["K_star"] is None
    assert bad["feasible_fraction"] == 0.0 and math.isnan(bad["mean_e_total"])
    assert good["K_star"] == 3 and np.isfinite(good["mean_e_total"])
    text = write_csv(rows)
    assert ",nan," in text.splitlines()[1]


def test_two_parameter_grid():
    rows = run_experiment(ScenarioConfig(), trials=1, seed=0, mode="hd",
                          sweeps=[parse_sweep("L=8,16"), parse_sweep("lambda=0.4,0.8")])
    assert [r["sweep_value"] for r in rows] == ["8.0|0.4", "8.0|0.8", "16.0|0.4", "16.0|0.8"]
    assert rows[0]["sweep_param"] == "antennas|tag_density"


def test_bad_arguments_raise_config_error():
    with pytest.raises(ConfigError):
        run_experiment(ScenarioConfig(), trials=1, mode="hd", algorithms=["jo-sca"])
    with pytest.raises(ConfigError):
        run_experiment(ScenarioConfig(), trials=0, mode="hd")
    with pytest.raises(ConfigError):
        run_experiment(ScenarioConfig(), trials=1, mode="xd")


def test_trial_errors_are_recorded():
    cfg = ScenarioConfig()
    res = run_trial(cfg, plan(cfg), 0, "fd", "no-such-algorithm")
    assert res.report is None and "unknown algorithm" in res.error


def test_algorithm_lists():
    assert algorithms_for("hd") == ("hd-closed-form",)
    assert set(algorithms_for("fd")) == {"jo-sca", "so-epa", "so-fb", "mrc-mrt", "rzf"}


def test_bootstrap():
    rng = np.random.default_rng(0)
    b = rng.normal(10, 1, 200)
    assert paired_bootstrap(b - 1.0, b) == 1.0
    assert paired_bootstrap(b + 1.0, b) == 0.0
    assert paired_bootstrap(b, b) == 1.0  # ties count as "not larger"
    noisy = paired_bootstrap(b + rng.normal(0, 1, 200), b)
    assert 0.0 < noisy < 1.0
    with pytest.raises(ValueError):
        paired_bootstrap([], [])


def test_write_csv_to_stream():
    rows = run_experiment(ScenarioConfig(), trials=1, seed=0, mode="hd")
    buf = io.StringIO()
    text = write_csv(rows, buf)
    assert buf.getvalue() == text
    assert len(text.splitlines()) == 2
