"""Scenario parameters and shared result records.

All powers are in watts, energies in joules, distances in metres and times in
sub-slots. ``sub_slot_duration`` converts sub-slots to seconds when energies
are accumulated.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "HexPlan",
    "ChannelSet",
    "Allocation",
    "EnergyReport",
    "validate",
    "load_config",
    "dump_config",
    "dbm_to_watt",
]


class ConfigError(ValueError):
    """Raised when a scenario violates one or more invariants.

    ``errors`` holds one human-readable message per violation.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def _frozen(a, dtype=None):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScenarioConfig:
    """Physical and optimisation parameters of one network scenario.

    Defaults reproduce the simulation setting with S = 500 m^2 and L = 8.
    ``time_max`` is not part of that setting and defaults to 1e4 sub-slots,
    which never binds there. ``tx_antennas``/``rx_antennas`` left as ``None``
    mean an even split of ``antennas`` in full-duplex mode.
    """

    coverage_area: float = 500.0
    tag_density: float = 0.8
    ap_height: float = 25.0
    pathloss_exponent: float = 2.8
    pathloss_tolerance: float = 0.4
    reflection: float = 0.8
    rate_min: float = 1.0
    ugv_speed: float = 2.0
    mobility_mu1: float = 0.29
    mobility_mu2: float = 7.4
    circuit_power_reader: float = 0.2
    circuit_power_ap: float = 0.5
    reader_power_max: float = 1.0
    ap_power_max: float = 10.0
    ugv_energy_max: float = 1.0e4
    time_max: float = 1.0e4
    antennas: int = 8
    tx_antennas: Optional[int] = None
    rx_antennas: Optional[int] = None
    noise_reader: float = 1.0e-5
    noise_ap: float = 1.0e-5
    sub_slot_duration: float = 1.0

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def antenna_split(self, mode: str) -> tuple[int, int]:
        """Return (transmit, receive) antenna counts for ``mode``."""
        if mode == "hd":
            return self.antennas, self.antennas
        lt = self.tx_antennas if self.tx_antennas is not None else self.antennas // 2
        lr = self.rx_antennas if self.rx_antennas is not None else self.antennas - lt
        return lt, lr


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
_INT_FIELDS = {"antennas", "tx_antennas", "rx_antennas"}
_POSITIVE = [
    "coverage_area",
    "ap_height",
    "ugv_speed",
    "mobility_mu1",
    "mobility_mu2",
    "circuit_power_reader",
    "circuit_power_ap",
    "reader_power_max",
    "ap_power_max",
    "ugv_energy_max",
    "time_max",
    "noise_reader",
    "noise_ap",
    "sub_slot_duration",
]


def validate(config: ScenarioConfig, mode: Optional[str] = None) -> ScenarioConfig:
    """Check every invariant of ``config`` and return it unchanged.

    Parameters
    ----------
    config : ScenarioConfig
    mode : {"hd", "fd", None}
        With ``"fd"`` the transmit/receive antenna partition is also checked.

    Raises
    ------
    ConfigError
        Listing every violated invariant.
    """
    errors = []
    for name in _FIELDS:
        value = getattr(config, name)
        if value is None:
            continue
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
            errors.append(f"{name} must be a finite number")
    if errors:
        raise ConfigError(errors)

    if config.pathloss_exponent <= 2:
        errors.append("alpha must exceed 2")
    if not 0.0 <= config.reflection <= 1.0:
        errors.append("reflection out of [0,1]")
    if config.pathloss_tolerance <= 0:
        errors.append("pathloss_tolerance must be positive")
    if config.tag_density < 0:
        errors.append("tag_density must be non-negative")
    if config.rate_min < 0:
        errors.append("rate_min must be non-negative")
    for name in _POSITIVE:
        if getattr(config, name) <= 0:
            errors.append(f"{name} must be positive")
    if config.antennas < 1:
        errors.append("antennas must be at least 1")
    if mode not in (None, "hd", "fd"):
        errors.append(f"unknown mode {mode!r}")
    if mode == "fd":
        lt, lr = config.antenna_split("fd")
        if lt < 1 or lr < 1:
            errors.append("tx_antennas and rx_antennas must be at least 1")
        if lt + lr != config.antennas:
            errors.append("tx_antennas + rx_antennas must equal antennas")
    if errors:
        raise ConfigError(errors)
    return config


def load_config(path) -> ScenarioConfig:
    """Read a flat ``key = value`` scenario file.

    Keys must be ScenarioConfig field names; omitted keys keep their default.
    Lines starting with ``#`` are comments.
    """
    text = Path(path).read_text()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[scenario]\n" + text)
    except configparser.Error as exc:
        raise ConfigError([f"malformed config file: {exc}"]) from exc

    values = {}
    errors = []
    for key, raw in parser["scenario"].items():
        if key not in _FIELDS:
            errors.append(f"unknown key {key!r}")
            continue
        raw = raw.strip()
        if raw.lower() == "none":
            values[key] = None
            continue
        try:
            values[key] = int(raw) if key in _INT_FIELDS else float(raw)
        except ValueError:
            errors.append(f"{key}: cannot parse {raw!r}")
    if errors:
        raise ConfigError(errors)
    return ScenarioConfig(**values)


def dump_config(config: ScenarioConfig, path=None) -> str:
    """Serialise ``config`` in the format read by :func:`load_config`."""
    lines = []
    for name in _FIELDS:
        value = getattr(config, name)
        lines.append(f"{name} = {'none' if value is None else repr(value)}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


@dataclass(frozen=True)
class HexPlan:
    """Planned hexagonal layout and UGV schedule.

    ``tags_per_cell`` is the integer number of tags simulated per cell while
    ``tags_per_cell_real`` is the (generally fractional) average used in the
    energy budget.
    """

    layers: int
    radius: float
    cells: int
    tags_per_cell: int
    tags_per_cell_real: float
    layer_index: np.ndarray
    ap_distance: np.ndarray
    trajectory: np.ndarray
    motion_time: float
    block_length: float
    tx_energy_budget: float

    def __post_init__(self):
        object.__setattr__(self, "layer_index", _frozen(self.layer_index, int))
        object.__setattr__(self, "ap_distance", _frozen(self.ap_distance, float))
        object.__setattr__(self, "trajectory", _frozen(self.trajectory, int))


@dataclass(frozen=True)
class ChannelSet:
    """One Monte-Carlo draw of every small-scale fading coefficient.

    Shapes: ``g`` (M, I), ``f`` (M, I, L_T), ``h`` (M, L_R) and ``q_si``
    (L_R, L_T) or ``None`` in half-duplex mode.
    """

    g: np.ndarray
    f: np.ndarray
    h: np.ndarray
    q_si: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("g", "f", "h", "q_si"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, _frozen(value, complex))


@dataclass(frozen=True)
class Allocation:
    """Beamformers, combiners and reader powers for every cell and tag.

    ``v`` is (M, L) in half-duplex mode (one combiner per cell) and
    (M, I, L_R) in full-duplex mode. ``flags`` collects named feasibility
    events such as ``"cap-exceeded@3"``.
    """

    w: np.ndarray
    v: np.ndarray
    p: np.ndarray
    skipped: np.ndarray
    mode: str
    algorithm: str
    flags: tuple = ()
    sca_iterations: int = 0
    objective_history: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "w", _frozen(self.w, complex))
        object.__setattr__(self, "v", _frozen(self.v, complex))
        object.__setattr__(self, "p", _frozen(self.p, float))
        object.__setattr__(self, "skipped", _frozen(self.skipped, bool))
        object.__setattr__(self, "flags", tuple(self.flags))
        object.__setattr__(self, "objective_history", tuple(self.objective_history))

    @property
    def feasible_fraction(self) -> float:
        if self.skipped.size == 0:
            return 1.0
        return float(1.0 - self.skipped.mean())


@dataclass(frozen=True)
class EnergyReport:
    e_ugv_motion: float
    e_reader_tx: float
    e_reader_circuit: float
    e_ap_tx: float
    e_ap_circuit: float
    rates: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def __post_init__(self):
        object.__setattr__(self, "rates", _frozen(self.rates, float))

    @property
    def e_circuit(self) -> float:
        return self.e_reader_circuit + self.e_ap_circuit

    @property
    def e_ugv(self) -> float:
        return self.e_ugv_motion + self.e_reader_tx + self.e_reader_circuit

    @property
    def e_ap(self) -> float:
        return self.e_ap_tx + self.e_ap_circuit

    @property
    def e_total(self) -> float:
        return (
            self.e_ugv_motion
            + self.e_reader_tx
            + self.e_reader_circuit
            + self.e_ap_tx
            + self.e_ap_circuit
        )
