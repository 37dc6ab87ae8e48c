"""Energy bookkeeping shared by both duplex modes."""

from __future__ import annotations

import numpy as np

from .model import Allocation, EnergyReport, HexPlan, ScenarioConfig

__all__ = ["energy_report"]


def energy_report(plan: HexPlan, config: ScenarioConfig, alloc: Allocation, rates=None) -> EnergyReport:
    """Decompose the UGV and AP energy of one allocation.

    Skipped tags contribute neither AP transmit energy nor a reader relay
    sub-slot. Reader energy per sub-slot is scaled by I_real / I so that a
    fully served network spends exactly I_real * sum(p_m).
    """
    dur = config.sub_slot_duration
    served = ~alloc.skipped
    motion = dur * (config.mobility_mu1 + config.mobility_mu2 * config.ugv_speed) * plan.motion_time
    if plan.tags_per_cell > 0:
        scale = plan.tags_per_cell_real / plan.tags_per_cell
        reader_tx = dur * scale * float(np.sum(alloc.p[:, None] * served))
        ap_tx = dur * float(np.sum(np.sum(np.abs(alloc.w) ** 2, axis=-1) * served))
    else:
        reader_tx = ap_tx = 0.0
    if rates is None:
        rates = np.zeros(alloc.skipped.shape)
    return EnergyReport(
        e_ugv_motion=motion,
        e_reader_tx=reader_tx,
        e_reader_circuit=dur * plan.block_length * config.circuit_power_reader,
        e_ap_tx=ap_tx,
        e_ap_circuit=dur * plan.block_length * config.circuit_power_ap,
        rates=rates,
    )
