"""Closed-form half-duplex resource allocation.

With all L antennas used for either transmission or reception, the rate
requirement splits into a downlink condition on the AP beamformer and an
uplink condition on the reader power. Both are met with equality by minimum
norm MRT, MRC and the matching reader power.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .energy import energy_report
from .model import Allocation, ChannelSet, EnergyReport, HexPlan, ScenarioConfig

__all__ = [
    "HdThresholds",
    "ReaderPower",
    "hd_thresholds",
    "tx_beamform_hd",
    "rx_beamform_hd",
    "reader_power_hd",
    "hd_rate",
    "hd_rates",
    "allocate_hd",
]


class HdThresholds(NamedTuple):
    """Required |f^H w|^2 per tag (``A``) and p |v^H h|^2 per cell (``B``).

    ``A`` is ``inf`` where the tag-reader channel is exactly zero
    (``zero_channel`` marks those tags).
    """

    A: np.ndarray
    B: np.ndarray
    zero_channel: np.ndarray


class ReaderPower(NamedTuple):
    p: np.ndarray
    cap_exceeded: np.ndarray
    budget_exceeded: bool


def hd_thresholds(plan: HexPlan, channels: ChannelSet, config: ScenarioConfig) -> HdThresholds:
    gain = 4.0**config.rate_min - 1.0
    d_alpha = plan.ap_distance**config.pathloss_exponent
    g2 = np.abs(channels.g) ** 2
    zero = g2 == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        A = d_alpha[:, None] * config.noise_reader * gain / (config.reflection * g2)
    A = np.where(zero, np.inf, A)
    B = d_alpha * config.noise_ap * gain
    return HdThresholds(A=A, B=B, zero_channel=zero)


def tx_beamform_hd(f, A, p_max):
    """Minimum-norm beamformer with |f^H w|^2 = A (maximum ratio transmission).

    Works elementwise over leading axes of ``f``. Returns ``(w, feasible)``;
    ``w`` is zero wherever the required power A / ||f||^2 exceeds ``p_max``.

    >>> w, ok = tx_beamform_hd(np.array([2.0, 0.0]), 1.0, 4.0)
    >>> w.real.tolist(), bool(ok)
    ([0.5, 0.0], True)
    """
    f = np.asarray(f, dtype=complex)
    A = np.asarray(A, dtype=float)
    norm2 = np.sum(np.abs(f) ** 2, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        feasible = np.isfinite(A) & (norm2 > 0) & (A <= p_max * norm2)
        w = np.sqrt(np.where(feasible, A, 0.0))[..., None] * f / np.where(norm2 > 0, norm2, 1.0)[..., None]
    return w, feasible


def rx_beamform_hd(h):
    """Maximum-ratio combiner h / ||h||. Returns ``(v, nonzero)``."""
    h = np.asarray(h, dtype=complex)
    norm = np.linalg.norm(h, axis=-1)
    ok = norm > 0
    v = h / np.where(ok, norm, 1.0)[..., None]
    return v, ok


def reader_power_hd(B, h, p_max, budget, tags_per_cell) -> ReaderPower:
    """Reader power B_m / ||h_m||^2 with the per-cell cap and network budget checks.

    The budget check counts only cells that respect the cap, since the reader
    stays silent in the others.
    """
    B = np.asarray(B, dtype=float)
    norm2 = np.sum(np.abs(np.asarray(h)) ** 2, axis=-1)
    with np.errstate(divide="ignore"):
        p = np.where(norm2 > 0, B / np.where(norm2 > 0, norm2, 1.0), np.inf)
    cap = p > p_max
    total = tags_per_cell * float(np.sum(p[~cap]))
    return ReaderPower(p=p, cap_exceeded=cap, budget_exceeded=bool(total > budget))


def _hd_rate_terms(w, v, p, g, f, h, d, config):
    scale = d**config.pathloss_exponent
    fw = np.abs(np.sum(np.conj(f) * w, axis=-1)) ** 2
    down = config.reflection * np.abs(g) ** 2 * fw / (config.noise_reader * scale)
    vh = np.abs(np.sum(np.conj(v) * h, axis=-1)) ** 2
    up = p * vh / (config.noise_ap * scale)
    return 0.5 * np.log2(1.0 + down), 0.5 * np.log2(1.0 + up)


def hd_rate(w, v, p, channels: ChannelSet, plan: HexPlan, config: ScenarioConfig, m: int, i: int) -> float:
    """Half-duplex rate of tag ``i`` in cell ``m`` (0-based) in bps/Hz."""
    down, up = _hd_rate_terms(
        w[m, i], v[m], p[m], channels.g[m, i], channels.f[m, i], channels.h[m], plan.ap_distance[m], config
    )
    return float(min(down, up))


def hd_rates(alloc: Allocation, channels: ChannelSet, plan: HexPlan, config: ScenarioConfig) -> np.ndarray:
    down, up = _hd_rate_terms(
        alloc.w,
        alloc.v[:, None, :],
        alloc.p[:, None],
        channels.g,
        channels.f,
        channels.h[:, None, :],
        plan.ap_distance[:, None],
        config,
    )
    return np.where(alloc.skipped, 0.0, np.minimum(down, up))


def allocate_hd(plan: HexPlan, channels: ChannelSet, config: ScenarioConfig) -> tuple[Allocation, EnergyReport]:
    """Optimal half-duplex allocation and its energy.

    Tags whose beamformer would exceed the AP power cap, and all tags of cells
    whose reader power would exceed its cap, are skipped and flagged.
    """
    thr = hd_thresholds(plan, channels, config)
    w, w_ok = tx_beamform_hd(channels.f, thr.A, config.ap_power_max)
    v, v_ok = rx_beamform_hd(channels.h)
    power = reader_power_hd(
        thr.B,
        np.where(v_ok[:, None], channels.h, 0.0),
        config.reader_power_max,
        plan.tx_energy_budget / config.sub_slot_duration,
        plan.tags_per_cell_real,
    )
    cell_bad = power.cap_exceeded | ~v_ok
    skipped = ~w_ok | cell_bad[:, None]

    flags = [f"tag-infeasible@{m},{i}" for m, i in zip(*np.nonzero(~w_ok))]
    flags += [f"cap-exceeded@{m}" for m in np.flatnonzero(cell_bad)]
    if power.budget_exceeded:
        flags.append("budget-exceeded")

    alloc = Allocation(
        w=w,
        v=v,
        p=np.where(np.isfinite(power.p), power.p, 0.0),
        skipped=skipped,
        mode="hd",
        algorithm="hd-closed-form",
        flags=flags,
    )
    rates = hd_rates(alloc, channels, plan, config)
    return alloc, energy_report(plan, config, alloc, rates)
