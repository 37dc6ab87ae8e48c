"""Command-line entry point.

Exit codes: 0 success, 2 configuration or validation error, 3 infeasible
plan, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness, planner
from .model import ConfigError, ScenarioConfig, load_config, validate

EXIT_OK, EXIT_CONFIG, EXIT_PLAN, EXIT_RUNTIME = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _add_config(p):
    p.add_argument("--config", metavar="PATH", help="scenario file (key = value lines); defaults to the built-in setting")


def _add_run_flags(p, sweep: bool):
    _add_config(p)
    p.add_argument("--seed", type=int, default=0, metavar="N", help="master seed (default 0)")
    p.add_argument("--trials", type=int, default=harness.DEFAULT_TRIALS, metavar="N",
                   help=f"Monte-Carlo trials per point (default {harness.DEFAULT_TRIALS})")
    p.add_argument("--mode", choices=("hd", "fd"), default="hd", help="duplex mode (default hd)")
    p.add_argument("--alg", metavar="NAME", default="all",
                   help="algorithm or comma list; 'all' runs every algorithm of the mode "
                        f"(fd: {', '.join(harness.algorithms_for('fd'))}; hd: {harness.HD_ALGORITHM})")
    p.add_argument("--out", metavar="PATH", help="CSV destination (default standard output)")
    p.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes (default 1)")
    p.add_argument("--id", dest="experiment_id", metavar="NAME", help="experiment_id column value")
    if sweep:
        p.add_argument("--sweep", action="append", required=True, metavar="PARAM=v1,v2,...",
                       help="swept parameter (config field or one of "
                            f"{', '.join(harness.SWEEP_ALIASES)}); give twice for a grid")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ugv-backscatter", description="Energy planning and allocation for UGV-assisted backscatter IoT.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("plan", help="print the hexagonal plan")
    _add_config(p)
    p.add_argument("--trajectory", metavar="PATH", help="also write the visiting order as CSV (cell, layer, distance)")

    p = sub.add_parser("run", help="run one Monte-Carlo experiment and write CSV")
    _add_run_flags(p, sweep=False)

    p = sub.add_parser("sweep", help="run a parameter sweep and write CSV")
    _add_run_flags(p, sweep=True)

    p = sub.add_parser("oracle-check", help="compare closed-form and brute-force layer counts")
    _add_config(p)
    p.add_argument("--random", type=int, default=0, metavar="N", help="also check N random scenarios")
    p.add_argument("--seed", type=int, default=0, metavar="N", help="seed for --random draws")

    p = sub.add_parser("selftest", help="run a quick invariant suite")
    p.add_argument("--seed", type=int, default=0, metavar="N", help="seed for random instances")
    return parser


def _load(path) -> ScenarioConfig:
    if path is None:
        return ScenarioConfig()
    try:
        return load_config(path)
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc.strerror or exc}"]) from exc


def _cmd_plan(args) -> int:
    config = validate(_load(args.config))
    hp = planner.plan(config)
    print(f"K* = {hp.layers}")
    print(f"r* = {hp.radius:.6g} m")
    print(f"M = {hp.cells}")
    print(f"I = {hp.tags_per_cell} (average {hp.tags_per_cell_real:.6g})")
    print(f"motion time t = {hp.motion_time:.6g}")
    print(f"block length T = {hp.block_length:.6g}")
    print(f"transmit energy budget C = {hp.tx_energy_budget:.6g} J")
    print("trajectory = " + " ".join(str(m) for m in hp.trajectory))
    if args.trajectory:
        with open(args.trajectory, "w") as fh:
            fh.write("cell,layer,distance_m\n")
            for m, k, d in zip(hp.trajectory, hp.layer_index, hp.ap_distance):
                fh.write(f"{m},{k},{d!r}\n")
    return EXIT_OK


def _algorithms(text: str):
    if text == "all":
        return None
    return [a.strip() for a in text.split(",") if a.strip()]


def _cmd_run(args, sweeps=()) -> int:
    config = _load(args.config)
    if args.jobs < 1:
        raise ConfigError(["--jobs must be at least 1"])
    validate(config, args.mode)
    if not sweeps:
        planner.plan(config)  # surface an infeasible base plan as exit 3
    rows = harness.run_experiment(
        config,
        trials=args.trials,
        seed=args.seed,
        mode=args.mode,
        algorithms=_algorithms(args.alg),
        sweeps=sweeps,
        jobs=args.jobs,
        experiment_id=args.experiment_id,
    )
    if args.out:
        with open(args.out, "w", newline="") as fh:
            harness.write_csv(rows, fh)
    else:
        harness.write_csv(rows, sys.stdout)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    return _cmd_run(args, [harness.parse_sweep(s) for s in args.sweep])


def _random_config(rng) -> ScenarioConfig:
    return ScenarioConfig(
        coverage_area=float(rng.uniform(100, 2000)),
        ap_height=float(rng.uniform(10, 40)),
        pathloss_tolerance=float(rng.uniform(0.2, 1.0)),
        pathloss_exponent=float(rng.uniform(2.2, 3.5)),
    )


def _compare(config) -> tuple[str, str]:
    def layers(fn, *a):
        try:
            return str(fn(config, *a))
        except planner.PlanningError as exc:
            return exc.code

    return layers(planner.optimal_layers), layers(planner.brute_force_layers)


def _cmd_oracle(args) -> int:
    config = validate(_load(args.config))
    closed, oracle = _compare(config)
    printed = planner.optimal_layers(config, "printed") if closed.isdigit() else closed
    verdict = "MATCH" if closed == oracle else "MISMATCH"
    print(f"closed-form K*={closed}, oracle K*={oracle}, {verdict} (printed-bound variant K*={printed})")
    if args.random:
        rng = np.random.default_rng(args.seed)
        mismatches = 0
        for n in range(args.random):
            cfg = _random_config(rng)
            closed, oracle = _compare(cfg)
            if closed != oracle:
                mismatches += 1
                print(f"draw {n}: S={cfg.coverage_area:.6g} d_AP={cfg.ap_height:.6g} "
                      f"theta={cfg.pathloss_tolerance:.6g} alpha={cfg.pathloss_exponent:.6g}: "
                      f"closed-form K*={closed}, oracle K*={oracle}")
        print(f"{args.random - mismatches}/{args.random} random scenarios match")
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    ok = run_selftest(seed=args.seed, stream=sys.stdout)
    return EXIT_OK if ok else EXIT_RUNTIME


COMMANDS = {
    "plan": _cmd_plan,
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "oracle-check": _cmd_oracle,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        for message in exc.errors:
            print(f"config error: {message}", file=sys.stderr)
        return EXIT_CONFIG
    except planner.PlanningError as exc:
        print(f"infeasible plan: {exc}", file=sys.stderr)
        return EXIT_PLAN
    except Exception as exc:  # noqa: BLE001 - any other failure maps to the runtime exit code
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
