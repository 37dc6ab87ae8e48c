"""Full-duplex allocation under AP self-interference.

The AP splits its antennas into a transmit array (beamformer ``w``) and a
receive array (combiner ``v``). The reader's relayed signal reaches the
receive array together with the AP's own leakage ``Q w``, so the uplink
constraint couples ``w`` and the reader power ``p``.

Algorithms
----------
jo-sca
    Joint optimisation of all beamformers and reader powers by successive
    convex approximation.
so-epa
    Equal reader power C / (I M) (capped), beamformers by per-tag SCA.
so-fb
    Maximum-ratio beamformers, interference-aware combiners and the smallest
    reader power that satisfies every tag of the cell.
mrc-mrt, rzf
    Baselines with fixed beamformers and the smallest sufficient power.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from . import convex
from .energy import energy_report
from .hd import tx_beamform_hd
from .model import Allocation, ChannelSet, EnergyReport, HexPlan, ScenarioConfig

__all__ = [
    "ALGORITHMS",
    "FdThresholds",
    "FdInstance",
    "fd_thresholds",
    "rx_beamform_fd",
    "rank_one_inverse",
    "si_constraint_residual",
    "si_constraint_residual_inverse",
    "min_reader_power",
    "combiner_reader_power",
    "linearized_constraints",
    "jo_sca",
    "so_epa",
    "so_fb",
    "baseline_mrc_mrt",
    "baseline_rzf",
    "fd_rate",
    "fd_rates",
    "allocate_fd",
]

SCA_TOL = 1e-6
SCA_MAX_ITER = 100
INIT_SLACK = 1e-3  # relative margin on the downlink constraint of a starting point
INIT_POWER_MARGIN = 0.1


class FdThresholds(NamedTuple):
    """Required |f^H w|^2 per tag (``A``) and SINR scale d^alpha (2^R - 1) per cell (``B``)."""

    A: np.ndarray
    B: np.ndarray
    zero_channel: np.ndarray


def fd_thresholds(plan: HexPlan, channels: ChannelSet, config: ScenarioConfig) -> FdThresholds:
    gain = 2.0**config.rate_min - 1.0
    d_alpha = plan.ap_distance**config.pathloss_exponent
    g2 = np.abs(channels.g) ** 2
    zero = g2 == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        A = d_alpha[:, None] * config.noise_reader * gain / (config.reflection * g2)
    return FdThresholds(A=np.where(zero, np.inf, A), B=d_alpha * gain, zero_channel=zero)


# ---------------------------------------------------------------- primitives


def _leak(q_si, w):
    return np.einsum("rt,...t->...r", q_si, w)


def _inner(a, b):
    return np.sum(np.conj(a) * b, axis=-1)


def _norm2(a):
    return np.sum(np.abs(a) ** 2, axis=-1)


def rank_one_inverse(u, sigma2):
    """Inverse of ``sigma2 * I + u u^H`` via Sherman-Morrison."""
    u = np.asarray(u, dtype=complex)
    n = u.shape[-1]
    outer = u[..., :, None] * np.conj(u)[..., None, :]
    denom = (sigma2 * (sigma2 + _norm2(u)))[..., None, None]
    return np.eye(n) / sigma2 - outer / denom


def rx_beamform_fd(h, q_si, w, sigma2):
    """Unit-norm combiner maximising |v^H h|^2 / (|v^H Q w|^2 + sigma2).

    The maximiser is proportional to (Q w w^H Q^H + sigma2 I)^{-1} h, which the
    rank-one structure reduces to h - u (u^H h) / (sigma2 + ||u||^2) with u = Q w.
    Broadcasts over leading axes of ``h`` and ``w``.
    """
    h = np.asarray(h, dtype=complex)
    u = _leak(q_si, np.asarray(w, dtype=complex))
    coef = _inner(u, h) / (sigma2 + _norm2(u))
    v = h - u * coef[..., None]
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def si_constraint_residual(p, w, h, q_si, b_prime, sigma2):
    """Uplink constraint with the matrix inverse eliminated; feasible iff <= 0.

    sigma2 B (||Qw||^2 + sigma2) / p + |h^H Q w|^2 - ||h||^2 ||Qw||^2 - sigma2 ||h||^2
    """
    u = _leak(q_si, w)
    uu, hh = _norm2(u), _norm2(h)
    return sigma2 * b_prime * (uu + sigma2) / p + np.abs(_inner(h, u)) ** 2 - hh * uu - sigma2 * hh


def si_constraint_residual_inverse(p, w, h, q_si, b_prime, sigma2):
    """Same constraint in its original form p h^H (Q w w^H Q^H + sigma2 I)^{-1} h - B; feasible iff >= 0."""
    u = _leak(q_si, w)
    n = np.shape(h)[-1]
    M = u[..., :, None] * np.conj(u)[..., None, :] + sigma2 * np.eye(n)
    quad = np.real(_inner(h, np.linalg.solve(M, np.asarray(h, dtype=complex)[..., None])[..., 0]))
    return p * quad - b_prime


def min_reader_power(w, h, q_si, b_prime, sigma2):
    """Smallest reader power meeting the uplink SINR target at the optimal combiner."""
    u = _leak(q_si, w)
    uu, hh = _norm2(u), _norm2(h)
    denom = hh * uu - np.abs(_inner(h, u)) ** 2 + sigma2 * hh
    return sigma2 * b_prime * (uu + sigma2) / denom


def combiner_reader_power(v, w, h, q_si, b_prime, sigma2):
    """Smallest reader power meeting the uplink SINR target with a given combiner ``v``."""
    u = _leak(q_si, w)
    return b_prime * (np.abs(_inner(v, u)) ** 2 + sigma2) / np.abs(_inner(v, h)) ** 2


def _rate_terms(w, v, p, g, f, h, q_si, d, config):
    scale = d**config.pathloss_exponent
    down = config.reflection * np.abs(g) ** 2 * np.abs(_inner(f, w)) ** 2 / (config.noise_reader * scale)
    sinr = p * np.abs(_inner(v, h)) ** 2 / (scale * (np.abs(_inner(v, _leak(q_si, w))) ** 2 + config.noise_ap))
    return np.log2(1.0 + down), np.log2(1.0 + sinr)


def fd_rate(w, v, p, channels: ChannelSet, plan: HexPlan, config: ScenarioConfig, m: int, i: int) -> float:
    """Full-duplex rate of tag ``i`` in cell ``m`` in bps/Hz (no half pre-log)."""
    down, up = _rate_terms(
        w[m, i], v[m, i], p[m], channels.g[m, i], channels.f[m, i], channels.h[m],
        channels.q_si, plan.ap_distance[m], config,
    )
    return float(min(down, up))


def fd_rates(alloc: Allocation, channels: ChannelSet, plan: HexPlan, config: ScenarioConfig) -> np.ndarray:
    down, up = _rate_terms(
        alloc.w, alloc.v, alloc.p[:, None], channels.g, channels.f, channels.h[:, None, :],
        channels.q_si, plan.ap_distance[:, None], config,
    )
    return np.where(alloc.skipped, 0.0, np.minimum(down, up))


# ---------------------------------------------------------------- instance


@dataclass
class FdInstance:
    """Everything the FD algorithms need for one trial."""

    A: np.ndarray
    B: np.ndarray
    f: np.ndarray
    h: np.ndarray
    q_si: np.ndarray
    sigma2: float
    p_max: float
    w_max: float
    tag_weight: float
    budget: float
    usable: np.ndarray

    @classmethod
    def from_plan(cls, plan: HexPlan, channels: ChannelSet, config: ScenarioConfig) -> "FdInstance":
        if channels.q_si is None:
            raise ValueError("full-duplex allocation needs a self-interference matrix")
        thr = fd_thresholds(plan, channels, config)
        h_ok = _norm2(channels.h) > 0
        return cls(
            A=thr.A,
            B=thr.B,
            f=np.asarray(channels.f),
            h=np.asarray(channels.h),
            q_si=np.asarray(channels.q_si),
            sigma2=config.noise_ap,
            p_max=config.reader_power_max,
            w_max=config.ap_power_max,
            tag_weight=plan.tags_per_cell_real,
            budget=plan.tx_energy_budget / config.sub_slot_duration,
            usable=~thr.zero_channel & h_ok[:, None],
        )

    @property
    def shape(self):
        return self.A.shape

    def tag_power(self, w):
        """Per-tag minimum reader power at the optimal combiner, shape (M, I)."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return min_reader_power(w, self.h[:, None, :], self.q_si, self.B[:, None], self.sigma2)

    def combiners(self, w):
        return rx_beamform_fd(self.h[:, None, :], self.q_si, w, self.sigma2)


def _cell_max(values, active):
    return np.max(np.where(active, values, -np.inf), axis=1, initial=-np.inf)


def _mrt(inst: FdInstance, active, slack=0.0):
    w, ok = tx_beamform_hd(inst.f, np.where(active, inst.A, np.inf) * (1.0 + slack), inst.w_max)
    return w, ok & active


def _zero_forcing(inst: FdInstance, slack):
    """Beamformers meeting the downlink target while nulling the leakage seen along h."""
    u = np.einsum("rt,mr->mt", np.conj(inst.q_si), inst.h)
    uu = _norm2(u)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        f_perp = inst.f - u[:, None, :] * (_inner(u[:, None, :], inst.f) / uu)[..., None]
    return tx_beamform_hd(f_perp, inst.A * (1.0 + slack), inst.w_max)


def _fixed_beam_powers(inst: FdInstance, tag_power, active, scale_to_budget):
    """Per-cell power max over tags, capped; returns (p, flags as (kind, cell))."""
    p = _cell_max(tag_power, active)
    served = np.any(active, axis=1)
    p = np.where(served, p, 0.0)
    events = []
    cap = served & (p > inst.p_max)
    events += [("cap", int(m)) for m in np.flatnonzero(cap)]
    p = np.where(cap, inst.p_max, p)
    total = inst.tag_weight * float(np.sum(p))
    if total > inst.budget:
        events.append(("budget", -1))
        if scale_to_budget:
            p = p * (inst.budget / total)
    return p, events


def _fixed_beam_allocation(plan, channels, config, algorithm, receiver, flag_prefix):
    inst = FdInstance.from_plan(plan, channels, config)
    w, active = _mrt(inst, inst.usable)
    if receiver == "mmse":
        v = inst.combiners(w)
        need = inst.tag_power(w)
    else:
        v_cell = inst.h / np.linalg.norm(inst.h, axis=-1, keepdims=True).clip(min=1e-300)
        v = np.broadcast_to(v_cell[:, None, :], inst.f.shape[:2] + v_cell.shape[-1:]).copy()
        with np.errstate(divide="ignore", invalid="ignore"):
            need = combiner_reader_power(v, w, inst.h[:, None, :], inst.q_si, inst.B[:, None], inst.sigma2)
    p, events = _fixed_beam_powers(inst, need, active, scale_to_budget=True)
    flags = _skip_flags(inst, active)
    for kind, m in events:
        if flag_prefix:
            flags.append(f"{flag_prefix}:{kind}" + (f"@{m}" if m >= 0 else ""))
        else:
            flags.append("cap-exceeded@%d" % m if kind == "cap" else "budget-exceeded")
    return _finish(plan, channels, config, inst, w, v, p, active, algorithm, flags)


def _skip_flags(inst, active):
    return [f"tag-infeasible@{m},{i}" for m, i in zip(*np.nonzero(~active))]


def _finish(plan, channels, config, inst, w, v, p, active, algorithm, flags, iterations=0, history=()):
    w = np.where(active[..., None], w, 0.0)
    alloc = Allocation(
        w=w, v=v, p=p, skipped=~active, mode="fd", algorithm=algorithm,
        flags=flags, sca_iterations=iterations, objective_history=history,
    )
    rates = fd_rates(alloc, channels, plan, config)
    return alloc, energy_report(plan, config, alloc, rates)


def so_fb(plan: HexPlan, channels: ChannelSet, config: ScenarioConfig) -> tuple[Allocation, EnergyReport]:
    """Fixed-beamformer allocation with the per-cell worst-case reader power.

    When the resulting power breaks the per-cell cap or the budget, the power
    is clipped and ``so-fb-infeasible:cap@m`` / ``so-fb-infeasible:budget`` is
    flagged; this does not mean the joint problem is infeasible.
    """
    return _fixed_beam_allocation(plan, channels, config, "so-fb", "mmse", "so-fb-infeasible")


def baseline_rzf(plan: HexPlan, channels: ChannelSet, config: ScenarioConfig) -> tuple[Allocation, EnergyReport]:
    """MRT beamformers, interference-aware combiners, smallest sufficient power."""
    return _fixed_beam_allocation(plan, channels, config, "rzf", "mmse", None)


def baseline_mrc_mrt(plan: HexPlan, channels: ChannelSet, config: ScenarioConfig) -> tuple[Allocation, EnergyReport]:
    """MRT beamformers, maximum-ratio combiners, smallest sufficient power."""
    return _fixed_beam_allocation(plan, channels, config, "mrc-mrt", "mrc", None)


# ---------------------------------------------------------------- SCA


def linearized_constraints(w_prev, inst: FdInstance, active, p_prev, fixed_p=None) -> convex.ConvexSubproblem:
    """Convex inner approximation of the FD program around ``w_prev``.

    Parameters
    ----------
    w_prev : (M, I, L_T) complex
        Anchor beamformers; also the solver's starting point.
    inst : FdInstance
    active : (M, I) bool
        Tags included in the program.
    p_prev : (M,) float
        Starting reader powers.
    fixed_p : (M,) float, optional
        Hold reader powers fixed (equal-power variant).
    """
    mi, ti = np.nonzero(active)
    cells = np.unique(mi)
    cell_of = np.searchsorted(cells, mi)
    w0 = w_prev[mi, ti]
    f = inst.f[mi, ti]
    h = inst.h[mi]
    Q = inst.q_si
    fw = _inner(f, w0)
    gram = np.conj(Q.T) @ Q
    qh = h @ np.conj(Q)  # rows are (Q^H h)^T
    hh = _norm2(h)
    u0 = _leak(Q, w0)
    J = len(mi)
    return convex.ConvexSubproblem(
        cell_of=cell_of,
        n_cells=len(cells),
        lin_a=f * fw[:, None],
        lin_b=inst.A[mi, ti] + np.abs(fw) ** 2,
        norm_cap=np.full(J, inst.w_max),
        w0=w0,
        p0=p_prev[cells],
        si_k=inst.sigma2 * inst.B[mi],
        si_R=np.broadcast_to(gram, (J,) + gram.shape),
        si_r0=np.full(J, inst.sigma2),
        si_H=qh[:, :, None] * np.conj(qh)[:, None, :],
        si_c=hh[:, None] * (w0 @ gram.T),
        si_e=hh * _norm2(u0) - inst.sigma2 * hh,
        p_weight=inst.tag_weight,
        p_max=inst.p_max,
        budget=inst.budget,
        budget_weight=inst.tag_weight,
        fixed_p=None if fixed_p is None else fixed_p[cells],
    )


def _interior_start(inst: FdInstance, active, fixed_p=None):
    """Strictly feasible beamformers and powers for the SCA.

    Starts from scaled-up MRT. Tags whose leakage would need too much reader
    power switch to a beamformer orthogonal to Q^H h, which needs the least
    power of all. Tags that still cannot be served are dropped.
    """
    grow = 1.0 + INIT_POWER_MARGIN
    w_mrt, ok_mrt = _mrt(inst, active, INIT_SLACK)
    w_zf, ok_zf = _zero_forcing(inst, INIT_SLACK)
    ok_zf &= active
    need_mrt = np.where(ok_mrt, inst.tag_power(w_mrt), np.inf)
    need_zf = np.where(ok_zf, inst.tag_power(w_zf), np.inf)
    limit = inst.p_max / grow if fixed_p is None else fixed_p[:, None] / grow
    use_zf = (need_mrt > limit) & (need_zf < need_mrt)
    w = np.where(use_zf[..., None], w_zf, w_mrt)
    need = np.where(use_zf, need_zf, need_mrt)
    keep = active & (need <= limit) & (_norm2(w) < inst.w_max)
    if fixed_p is not None:
        return w, fixed_p.copy(), keep
    p = np.where(np.any(keep, axis=1), grow * _cell_max(need, keep), 0.0)
    p = np.minimum(p, inst.p_max * (1.0 - 1e-9))
    return w, p, keep


def _so_fb_start(inst: FdInstance, active):
    """SCA anchor from the SO-FB solution plus a strictly feasible hint.

    Cells whose SO-FB power is within the cap use the SO-FB point as anchor
    (tight, hence not strictly feasible) and an inflated copy as hint. The
    other cells fall back to :func:`_interior_start`, which serves as both.
    Returns ``(w, p, hint_w, hint_p, active)``.
    """
    w_fb, ok = _mrt(inst, active)
    need = np.where(ok, inst.tag_power(w_fb), np.inf)
    p_fb = _cell_max(need, ok)
    fb_cells = np.any(ok, axis=1) & (p_fb <= inst.p_max) & np.all(ok | ~active, axis=1)
    w_in, p_in, keep = _interior_start(inst, active)
    hint_w, _ = _mrt(inst, ok, INIT_SLACK)
    hint_need = np.where(ok, inst.tag_power(hint_w), np.inf)
    hint_p = np.minimum((1.0 + INIT_POWER_MARGIN) * _cell_max(hint_need, ok), inst.p_max * (1.0 - 1e-9))
    fb_cells &= hint_p > _cell_max(hint_need, ok)
    sel = fb_cells[:, None]
    w = np.where(sel[..., None], w_fb, w_in)
    hw = np.where(sel[..., None], hint_w, w_in)
    p = np.where(fb_cells, p_fb, p_in)
    hp = np.where(fb_cells, hint_p, p_in)
    act = np.where(sel, ok, keep)
    return w, np.where(np.any(act, axis=1), p, 0.0), hw, np.where(np.any(act, axis=1), hp, 0.0), act


def _objective(inst, w, p, active, fixed):
    value = float(np.sum(_norm2(w) * active))
    cells = np.any(active, axis=1)
    return value + inst.tag_weight * float(np.sum(p * cells))


def _interior_hint(sub: convex.ConvexSubproblem, centre_w, centre_p):
    """Replace the anchor hint by a point well inside the new feasible set.

    The anchor sits almost on the boundary, which cripples a barrier method.
    The previous program's well-centred point usually satisfies the new
    constraints too; per cell, the largest mix towards it that keeps the
    constraints strictly satisfied is used (mix 0 is the anchor itself).
    """
    cell = sub.cell_of
    chosen = np.full(sub.n_cells, -1.0)
    for theta in 0.5 ** np.arange(0, 12):
        w = (1 - theta) * sub.w0 + theta * centre_w
        p = (1 - theta) * sub.p0 + theta * centre_p
        vals = convex.evaluate_constraints(sub, w, p if sub.free_p else None)
        bad = np.zeros(sub.n_cells, dtype=bool)
        for name, v in vals.items():
            if name == "budget":
                continue
            if v.shape[0] == len(cell) and name not in ("floor", "pmax"):
                bad |= np.bincount(cell, weights=(v >= 0), minlength=sub.n_cells) > 0
            else:
                bad |= v >= 0
        take = (chosen < 0) & ~bad
        chosen[take] = theta
        if np.all(chosen >= 0):
            break
    chosen = np.maximum(chosen, 0.0)
    mix_t = chosen[cell][:, None]
    hint = replace(sub, w0=(1 - mix_t) * sub.w0 + mix_t * centre_w, p0=(1 - chosen) * sub.p0 + chosen * centre_p)
    vals = convex.evaluate_constraints(hint, hint.w0, hint.p0 if hint.free_p else None)
    if "budget" in vals and vals["budget"][0] >= 0:
        return sub
    return hint


def _run_sca(inst: FdInstance, w, p, active, fixed_p=None, tol=SCA_TOL, max_iter=SCA_MAX_ITER, hint=None):
    """Iterate the convex approximations from anchor ``(w, p)``.

    ``hint`` is a strictly feasible point for the first program when the
    anchor itself lies on the boundary.
    """
    history = [_objective(inst, w, p, active, fixed_p)]
    status = "stalled"
    n = 0
    if not np.any(active):
        return w, p, [], 0, "converged"
    mi, ti = np.nonzero(active)
    cells = np.unique(mi)
    centre = None if hint is None else (hint[0][mi, ti], hint[1][cells])
    for n in range(1, max_iter + 1):
        sub = linearized_constraints(w, inst, active, p, fixed_p)
        if centre is not None:
            sub = _interior_hint(sub, *centre)
        try:
            res = convex.solve(sub)
        except convex.ConvexError:
            # no strictly feasible start: keep the current (feasible) iterate
            status = "converged" if n > 1 else "stalled"
            n -= 1
            break
        centre = (res.centre_w, res.centre_p)
        candidate_w = w.copy()
        candidate_w[mi, ti] = res.w
        candidate_p = p.copy()
        candidate_p[cells] = res.p
        value = _objective(inst, candidate_w, candidate_p, active, fixed_p)
        if value > history[-1] or res.status == "numerical-error":
            # the anchor is optimal for its own linearisation up to solver accuracy
            status = "converged"
            n -= 1
            break
        w, p = candidate_w, candidate_p
        history.append(value)
        if history[-2] - value <= tol * max(abs(history[-2]), 1e-300):
            status = "converged"
            break
    return w, p, history, n, status


def jo_sca(plan: HexPlan, channels: ChannelSet, config: ScenarioConfig, init: Optional[Allocation] = None,
           tol: float = SCA_TOL, max_iter: int = SCA_MAX_ITER) -> tuple[Allocation, EnergyReport]:
    """Joint beamformer and reader-power optimisation by SCA.

    ``init`` may supply a strictly feasible allocation. By default the SO-FB
    solution is the starting point wherever it respects the power cap (see
    :func:`_so_fb_start`).
    Flags ``no-feasible-init`` if no tag can be started and ``sca-stalled``
    if ``max_iter`` is reached before the relative change drops below ``tol``.
    """
    inst = FdInstance.from_plan(plan, channels, config)
    active = inst.usable.copy()
    flags = []
    hint = None
    if init is not None:
        w, p, active = np.array(init.w), np.array(init.p), active & ~init.skipped
    else:
        w, p, hint_w, hint_p, active = _so_fb_start(inst, active)
        hint = (hint_w, hint_p)
    if inst.tag_weight * float(np.sum(p)) >= inst.budget:
        flags.append("no-feasible-init")
        active[:] = False
    flags += _skip_flags(inst, active)
    if not np.any(active) and "no-feasible-init" not in flags:
        flags.append("no-feasible-init")
    w, p, history, n, status = _run_sca(inst, w, p, active, tol=tol, max_iter=max_iter, hint=hint)
    if status == "stalled":
        flags.append("sca-stalled")
    p = np.where(np.any(active, axis=1), p, 0.0)
    v = inst.combiners(w)
    return _finish(plan, channels, config, inst, w, v, p, active, "jo-sca", flags, n, history)


def equal_power(plan: HexPlan, config: ScenarioConfig) -> float:
    """Reader power of the equal-power scheme: min(C / (I M), p_max)."""
    if plan.tags_per_cell_real <= 0:
        return config.reader_power_max
    share = plan.tx_energy_budget / config.sub_slot_duration / (plan.tags_per_cell_real * plan.cells)
    return min(share, config.reader_power_max)


def so_epa(plan: HexPlan, channels: ChannelSet, config: ScenarioConfig,
           tol: float = SCA_TOL, max_iter: int = SCA_MAX_ITER) -> tuple[Allocation, EnergyReport]:
    """Equal reader power in every cell and per-tag SCA beamformers.

    The per-tag programs are independent; they are stacked and solved in
    lockstep as one separable program.
    """
    inst = FdInstance.from_plan(plan, channels, config)
    fixed = np.full(plan.cells, equal_power(plan, config))
    w, p, active = _interior_start(inst, inst.usable.copy(), fixed_p=fixed)
    flags = _skip_flags(inst, active)
    if inst.tag_weight * float(np.sum(fixed * np.any(active, axis=1))) > inst.budget * (1 + 1e-12):
        flags.append("budget-exceeded")
    w, p, history, n, status = _run_sca(inst, w, fixed, active, fixed_p=fixed, tol=tol, max_iter=max_iter)
    if status == "stalled":
        flags.append("sca-stalled")
    p = np.where(np.any(active, axis=1), fixed, 0.0)
    v = inst.combiners(w)
    return _finish(plan, channels, config, inst, w, v, p, active, "so-epa", flags, n, history)


ALGORITHMS = {
    "jo-sca": jo_sca,
    "so-epa": so_epa,
    "so-fb": so_fb,
    "mrc-mrt": baseline_mrc_mrt,
    "rzf": baseline_rzf,
}


def allocate_fd(plan: HexPlan, channels: ChannelSet, config: ScenarioConfig, algorithm: str = "jo-sca"):
    try:
        fn = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {sorted(ALGORITHMS)}") from None
    return fn(plan, channels, config)
