"""Quick invariant suite behind ``ugv-backscatter selftest``."""

from __future__ import annotations

import sys

import numpy as np

from . import fd, harness, hd, planner
from .channels import complex_normal, sample_channels
from .model import ScenarioConfig


def _plan_reference():
    hp = planner.plan(ScenarioConfig())
    return hp.layers == 3 and hp.cells == 36, f"K*={hp.layers} M={hp.cells}"


def _oracle_agreement():
    config = ScenarioConfig()
    closed, oracle = planner.optimal_layers(config), planner.brute_force_layers(config)
    return closed == oracle, f"closed-form {closed}, oracle {oracle}"


def _hd_tightness(seed):
    config = ScenarioConfig()
    hp = planner.plan(config)
    ch = sample_channels(seed, hp, config, mode="hd")
    alloc, _ = hd.allocate_hd(hp, ch, config)
    thr = hd.hd_thresholds(hp, ch, config)
    served = ~alloc.skipped
    fw = np.abs(np.sum(np.conj(ch.f) * alloc.w, axis=-1)) ** 2
    err_w = np.max(np.abs(fw - thr.A)[served] / thr.A[served])
    vh = np.abs(np.sum(np.conj(alloc.v) * ch.h, axis=-1)) ** 2
    cells = ~np.all(alloc.skipped, axis=1)
    err_p = np.max(np.abs(alloc.p * vh - thr.B)[cells] / thr.B[cells])
    return max(err_w, err_p) < 1e-9, f"max relative error {max(err_w, err_p):.2e}"


def _fd_receiver(rng):
    h, w = complex_normal(rng, 4), complex_normal(rng, 4)
    q = complex_normal(rng, (4, 4))
    v = fd.rx_beamform_fd(h, q, w, 1e-2)
    u = q @ w

    def quotient(x):
        return np.abs(np.vdot(x, h)) ** 2 / (np.abs(np.vdot(x, u)) ** 2 + 1e-2 * np.sum(np.abs(x) ** 2, axis=-1))

    trial = complex_normal(rng, (2000, 4))
    best = max(quotient(x) for x in trial)
    return quotient(v) >= best, f"optimal {quotient(v):.6g} vs best random {best:.6g}"


def _si_forms(rng):
    bad = 0
    for _ in range(200):
        h, w = complex_normal(rng, 4), complex_normal(rng, 4)
        q = 0.3 * complex_normal(rng, (4, 4))
        p, b, s2 = rng.uniform(0.01, 2.0), rng.uniform(0.1, 10.0), 0.05
        r1 = fd.si_constraint_residual(p, w, h, q, b, s2)
        r2 = fd.si_constraint_residual_inverse(p, w, h, q, b, s2)
        if np.sign(r1) != -np.sign(r2):
            bad += 1
    return bad == 0, f"{bad}/200 sign disagreements"


def _determinism():
    config = ScenarioConfig(coverage_area=100.0)
    a = harness.write_csv(harness.run_experiment(config, trials=3, seed=5, mode="fd", algorithms=["so-fb", "rzf"]))
    b = harness.write_csv(harness.run_experiment(config, trials=3, seed=5, mode="fd", algorithms=["so-fb", "rzf"]))
    return a == b, "identical CSV" if a == b else "CSV differs"


def run_selftest(seed: int = 0, stream=None) -> bool:
    """Run every check, print one PASS/FAIL line each and return overall success."""
    stream = stream or sys.stdout
    rng = np.random.default_rng(seed)
    checks = [
        ("planner reference setting", _plan_reference),
        ("planner closed form matches oracle", _oracle_agreement),
        ("half-duplex constraints tight", lambda: _hd_tightness(seed)),
        ("full-duplex combiner optimal", lambda: _fd_receiver(rng)),
        ("uplink constraint forms agree", lambda: _si_forms(rng)),
        ("experiment output deterministic", _determinism),
    ]
    all_ok = True
    for name, check in checks:
        try:
            ok, detail = check()
        except Exception as exc:  # noqa: BLE001 - reported as a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        all_ok &= bool(ok)
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}", file=stream)
    return all_ok
