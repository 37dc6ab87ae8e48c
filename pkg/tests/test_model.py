import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ugv_backscatter.model import (
    ConfigError,
    EnergyReport,
    ScenarioConfig,
    dbm_to_watt,
    dump_config,
    load_config,
    validate,
)


def test_reference_defaults_are_valid(table_config):
    assert validate(table_config) is table_config
    assert validate(table_config, "fd") is table_config


def test_reflection_above_one_is_rejected():
    with pytest.raises(ConfigError) as exc:
        validate(ScenarioConfig(reflection=1.2))
    assert "reflection out of [0,1]" in exc.value.errors


def test_fd_partition_must_sum_to_antennas():
    cfg = ScenarioConfig(antennas=8, tx_antennas=3, rx_antennas=4)
    validate(cfg, "hd")
    with pytest.raises(ConfigError) as exc:
        validate(cfg, "fd")
    assert any("must equal antennas" in e for e in exc.value.errors)


def test_every_violation_is_listed():
    cfg = ScenarioConfig(pathloss_exponent=2.0, reflection=-0.1, pathloss_tolerance=0.0, antennas=0)
    with pytest.raises(ConfigError) as exc:
        validate(cfg)
    assert "alpha must exceed 2" in exc.value.errors
    assert "reflection out of [0,1]" in exc.value.errors
    assert "pathloss_tolerance must be positive" in exc.value.errors
    assert "antennas must be at least 1" in exc.value.errors


def test_non_finite_value_is_rejected():
    with pytest.raises(ConfigError):
        validate(ScenarioConfig(coverage_area=math.nan))


def test_default_noise_is_minus_twenty_dbm(table_config):
    assert table_config.noise_ap == pytest.approx(dbm_to_watt(-20.0), rel=1e-12)
    assert table_config.noise_reader == pytest.approx(dbm_to_watt(-20.0), rel=1e-12)


def test_fd_split_defaults_to_halves():
    assert ScenarioConfig(antennas=16).antenna_split("fd") == (8, 8)
    assert ScenarioConfig(antennas=16).antenna_split("hd") == (16, 16)


finite = dict(allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(
    area=st.floats(1.0, 1e4, **finite),
    density=st.floats(0.0, 5.0, **finite),
    alpha=st.floats(2.01, 5.0, **finite),
    eta=st.floats(0.0, 1.0, **finite),
    antennas=st.integers(1, 64),
)
def test_config_file_round_trip(tmp_path_factory, area, density, alpha, eta, antennas):
    cfg = validate(ScenarioConfig(coverage_area=area, tag_density=density, pathloss_exponent=alpha,
                                  reflection=eta, antennas=antennas))
    path = tmp_path_factory.mktemp("cfg") / "scenario.cfg"
    dump_config(cfg, path)
    assert load_config(path) == cfg


def test_unknown_key_is_an_error(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("coverage_area = 100\nwidth = 3\n")
    with pytest.raises(ConfigError) as exc:
        load_config(path)
    assert exc.value.errors == ["unknown key 'width'"]


def test_comments_and_partial_files(tmp_path):
    path = tmp_path / "part.cfg"
    path.write_text("# scenario\ncoverage_area = 100  # m^2\ntx_antennas = none\n")
    cfg = load_config(path)
    assert cfg.coverage_area == 100.0
    assert cfg.antennas == ScenarioConfig().antennas


def test_energy_total_is_component_sum():
    rep = EnergyReport(e_ugv_motion=1072.25, e_reader_tx=0.125, e_reader_circuit=94.5, e_ap_tx=80.0625, e_ap_circuit=235.5)
    parts = rep.e_ugv_motion + rep.e_reader_tx + rep.e_reader_circuit + rep.e_ap_tx + rep.e_ap_circuit
    assert rep.e_total == pytest.approx(parts, rel=1e-9)
    assert rep.e_ugv + rep.e_ap == pytest.approx(rep.e_total, rel=1e-9)


def test_records_are_immutable(table_plan):
    with pytest.raises(ValueError):
        table_plan.ap_distance[0] = 0.0
    with pytest.raises(AttributeError):
        table_plan.layers = 4
