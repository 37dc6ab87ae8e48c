"""Monte-Carlo experiment runner.

A trial is one channel draw pushed through planning, allocation and energy
accounting. Trial ``k`` of an experiment with master seed ``s`` always uses
the draw ``sample_channels(s, plan, config, mode, trial=k)``, so every
algorithm and both duplex modes see the same fading realisations (paired
comparisons) and results do not depend on how trials are scheduled.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import fd, hd
from .channels import sample_channels
from .model import ConfigError, EnergyReport, HexPlan, ScenarioConfig, validate
from .planner import PlanningError, plan as make_plan

__all__ = [
    "CSV_COLUMNS",
    "DEFAULT_TRIALS",
    "HD_ALGORITHM",
    "SWEEP_ALIASES",
    "TrialResult",
    "algorithms_for",
    "run_trial",
    "run_trials",
    "run_experiment",
    "parse_sweep",
    "write_csv",
    "paired_bootstrap",
]

DEFAULT_TRIALS = 800
HD_ALGORITHM = "hd-closed-form"
RATE_SLACK = 1e-6  # relative shortfall below rate_min still counted as served

CSV_COLUMNS = (
    "experiment_id",
    "sweep_param",
    "sweep_value",
    "mode",
    "algorithm",
    "L",
    "trials",
    "K_star",
    "r_star",
    "M",
    "I",
    "mean_e_ugv_motion",
    "mean_e_reader_tx",
    "mean_e_ap_tx",
    "mean_e_circuit",
    "mean_e_total",
    "std_e_total",
    "feasible_fraction",
    "mean_sca_iterations",
)

SWEEP_ALIASES = {
    "L": "antennas",
    "S": "coverage_area",
    "theta": "pathloss_tolerance",
    "lambda": "tag_density",
    "alpha": "pathloss_exponent",
    "d_ap": "ap_height",
}


def algorithms_for(mode: str) -> tuple[str, ...]:
    if mode == "hd":
        return (HD_ALGORITHM,)
    if mode == "fd":
        return tuple(fd.ALGORITHMS)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class TrialResult:
    """Outcome of one (trial, algorithm) pair.

    ``report`` is ``None`` when the allocation raised; ``error`` then holds
    the message and the trial counts as fully infeasible.
    """

    trial: int
    mode: str
    algorithm: str
    report: Optional[EnergyReport]
    feasible_fraction: float
    sca_iterations: int = 0
    flags: tuple = ()
    error: str = ""


def _served_fraction(rates, rate_min) -> float:
    rates = np.asarray(rates)
    if rates.size == 0:
        return 1.0
    return float(np.mean(rates >= rate_min * (1.0 - RATE_SLACK)))


def run_trial(config: ScenarioConfig, plan: HexPlan, seed: int, mode: str, algorithm: str,
              trial: int = 0, channels=None) -> TrialResult:
    """Run one allocation on trial ``trial`` of master seed ``seed``.

    Exceptions from the allocation are caught and recorded so that a single
    bad draw never aborts a batch.
    """
    try:
        if channels is None:
            channels = sample_channels(seed, plan, config, mode=mode, trial=trial)
        if mode == "hd":
            if algorithm not in (HD_ALGORITHM, "closed-form"):
                raise ValueError(f"unknown half-duplex algorithm {algorithm!r}")
            alloc, report = hd.allocate_hd(plan, channels, config)
        elif mode == "fd":
            alloc, report = fd.allocate_fd(plan, channels, config, algorithm)
        else:
            raise ValueError(f"unknown mode {mode!r}")
    except (ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        return TrialResult(trial, mode, algorithm, None, 0.0, error=f"{type(exc).__name__}: {exc}")
    return TrialResult(
        trial=trial,
        mode=mode,
        algorithm=algorithm,
        report=report,
        feasible_fraction=_served_fraction(report.rates, config.rate_min),
        sca_iterations=alloc.sca_iterations,
        flags=alloc.flags,
    )


def _trial_task(args):
    config, plan, seed, mode, algorithms, trial = args
    try:
        channels = sample_channels(seed, plan, config, mode=mode, trial=trial)
    except ValueError as exc:
        return [TrialResult(trial, mode, a, None, 0.0, error=f"ValueError: {exc}") for a in algorithms]
    return [run_trial(config, plan, seed, mode, a, trial, channels) for a in algorithms]


def run_trials(config: ScenarioConfig, plan: HexPlan, seed: int, mode: str, algorithms: Sequence[str],
               trials: int, jobs: int = 1, executor=None) -> dict[str, list[TrialResult]]:
    """Run ``trials`` paired trials for each algorithm; results are in trial order."""
    tasks = [(config, plan, seed, mode, tuple(algorithms), k) for k in range(trials)]
    if executor is not None:
        chunk = max(1, trials // (4 * max(jobs, 1)))
        batches = list(executor.map(_trial_task, tasks, chunksize=chunk))
    else:
        batches = [_trial_task(t) for t in tasks]
    out = {a: [] for a in algorithms}
    for batch in batches:
        for result in batch:
            out[result.algorithm].append(result)
    return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def _aggregate(results: list[TrialResult]) -> dict:
    ok = [r.report for r in results if r.report is not None]
    row = {"feasible_fraction": float(np.mean([r.feasible_fraction for r in results])) if results else math.nan}
    if ok:
        total = np.array([rep.e_total for rep in ok])
        row.update(
            mean_e_ugv_motion=float(np.mean([rep.e_ugv_motion for rep in ok])),
            mean_e_reader_tx=float(np.mean([rep.e_reader_tx for rep in ok])),
            mean_e_ap_tx=float(np.mean([rep.e_ap_tx for rep in ok])),
            mean_e_circuit=float(np.mean([rep.e_circuit for rep in ok])),
            mean_e_total=float(np.mean(total)),
            std_e_total=float(np.std(total, ddof=1)) if len(ok) > 1 else 0.0,
        )
    else:
        for name in ("mean_e_ugv_motion", "mean_e_reader_tx", "mean_e_ap_tx", "mean_e_circuit",
                     "mean_e_total", "std_e_total"):
            row[name] = math.nan
    row["mean_sca_iterations"] = float(np.mean([r.sca_iterations for r in results])) if results else math.nan
    return row


def parse_sweep(text: str) -> tuple[str, list[float]]:
    """Parse ``PARAM=v1,v2,...`` into a config field name and its values.

    ``PARAM`` is a :class:`ScenarioConfig` field or one of
    :data:`SWEEP_ALIASES`.
    """
    name, sep, values = text.partition("=")
    name = name.strip()
    if not sep or not values.strip():
        raise ConfigError([f"sweep {text!r} must look like PARAM=v1,v2,..."])
    field_name = SWEEP_ALIASES.get(name, name)
    if field_name not in ScenarioConfig.__dataclass_fields__:
        raise ConfigError([f"unknown sweep parameter {name!r}"])
    try:
        parsed = [float(v) for v in values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError([f"sweep {text!r} has a non-numeric value"]) from None
    return field_name, parsed


def _apply(config: ScenarioConfig, field_name: str, value: float) -> ScenarioConfig:
    if field_name in ("antennas", "tx_antennas", "rx_antennas"):
        if value != int(value):
            raise ConfigError([f"{field_name} must be an integer, got {value!r}"])
        value = int(value)
    return config.replace(**{field_name: value})


@dataclass
class _Point:
    param: str
    value: str
    config: Optional[ScenarioConfig] = None
    plan: Optional[HexPlan] = None
    error: str = ""
    results: dict = field(default_factory=dict)


def run_experiment(config: ScenarioConfig, trials: int = DEFAULT_TRIALS, seed: int = 0, mode: str = "hd",
                   algorithms: Optional[Sequence[str]] = None, sweeps: Sequence[tuple[str, Sequence[float]]] = (),
                   jobs: int = 1, experiment_id: Optional[str] = None) -> list[dict]:
    """Run paired trials at every sweep point and aggregate them into table rows.

    Parameters
    ----------
    config : ScenarioConfig
        Base scenario; swept fields are overridden per point.
    trials : int
    seed : int
        Master seed shared by all points and algorithms.
    mode : {"hd", "fd"}
    algorithms : sequence of str, optional
        Defaults to every algorithm available in ``mode``.
    sweeps : sequence of (field, values)
        Zero, one or two swept parameters; two give their Cartesian product.
    jobs : int
        Worker processes. Output does not depend on it.
    experiment_id : str, optional

    Returns
    -------
    list of dict
        One row per (sweep point, algorithm) keyed by :data:`CSV_COLUMNS`.
        Points whose configuration or plan is invalid still get rows, with
        empty plan fields, NaN energies and zero feasible fraction.
    """
    if mode not in ("hd", "fd"):
        raise ConfigError([f"unknown mode {mode!r}"])
    algorithms = tuple(algorithms) if algorithms else algorithms_for(mode)
    for a in algorithms:
        if a not in algorithms_for(mode) and not (mode == "hd" and a == "closed-form"):
            raise ConfigError([f"unknown {mode} algorithm {a!r}; choose from {', '.join(algorithms_for(mode))}"])
    if len(sweeps) > 2:
        raise ConfigError(["at most two sweep parameters are supported"])
    if trials < 1:
        raise ConfigError(["trials must be at least 1"])
    if experiment_id is None:
        experiment_id = f"{mode}-s{seed}"

    names = [name for name, _ in sweeps]
    points = []
    for combo in itertools.product(*[values for _, values in sweeps]):
        point = _Point(param="|".join(names) or "none", value="|".join(_fmt(float(v)) for v in combo))
        try:
            cfg = config
            for name, value in zip(names, combo):
                cfg = _apply(cfg, name, value)
            point.config = validate(cfg, mode)
            point.plan = make_plan(point.config)
        except (ConfigError, PlanningError, TypeError) as exc:
            point.error = str(exc)
        points.append(point)

    executor = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for point in points:
            if point.plan is not None:
                point.results = run_trials(point.config, point.plan, seed, mode, algorithms, trials, jobs, executor)
    finally:
        if executor is not None:
            executor.shutdown()

    rows = []
    for point in points:
        for a in algorithms:
            row = {
                "experiment_id": experiment_id,
                "sweep_param": point.param,
                "sweep_value": point.value,
                "mode": mode,
                "algorithm": a,
                "L": point.config.antennas if point.config is not None else None,
                "trials": trials,
            }
            if point.plan is not None:
                row.update(K_star=point.plan.layers, r_star=point.plan.radius, M=point.plan.cells,
                           I=point.plan.tags_per_cell)
                row.update(_aggregate(point.results[a]))
            else:
                row.update(K_star=None, r_star=None, M=None, I=None)
                row.update(_aggregate([]))
                row["feasible_fraction"] = 0.0
            rows.append(row)
    return rows


def write_csv(rows: Sequence[dict], stream=None) -> str:
    """Write rows with the fixed column order; returns the CSV text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row.get(col)) for col in CSV_COLUMNS])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def paired_bootstrap(a, b, n_boot: int = 10000, seed: int = 0) -> float:
    """Bootstrap confidence that mean(a) <= mean(b) for paired samples.

    Returns the fraction of resampled mean differences ``mean(a - b)`` that
    are <= 0. Exact ties in every pair therefore give confidence 1.
    """
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    if diff.size == 0:
        raise ValueError("no paired samples")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, diff.size, size=(n_boot, diff.size))
    means = diff[idx].mean(axis=1)
    return float(np.mean(means <= 0.0))
