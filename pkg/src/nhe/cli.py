"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_json, resolve
from .dynamics import PostSelectionError
from .experiments import OBJECTIVES, OptimumNotFound, find_optimal_drive, find_optimal_time, run_scenario
from .output import write_result
from .presets import PRESETS

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
OUT_ENV = "NHE_OUT_DIR"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _add_common(p):
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--preset", "--scenario", dest="scenario", help="built-in scenario name")
    p.add_argument("--n", type=int)
    p.add_argument("--gamma", type=float, help="loss rate of every qubit (rad/us)")
    p.add_argument("--omega", type=float, help="drive amplitude of every qubit (rad/us)")
    p.add_argument("--delta", type=float, help="detuning of every qubit (rad/us)")
    p.add_argument("--J", type=float, help="coupling strength (rad/us)")
    p.add_argument("--topology", choices=["all_to_all", "nearest_neighbour", "custom"])
    p.add_argument("--dt", type=float, help="time step (us)")
    p.add_argument("--t-stop", dest="t_stop", type=float, help="end of the time grid (us)")
    p.add_argument("--norm-floor", dest="norm_floor", type=float)
    p.add_argument("--out", dest="output", help=f"output root (default ${OUT_ENV} or ./out)")
    p.add_argument("--format", choices=["csv", "json"])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nhe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (("simulate", "time evolution of one configuration"),
                        ("sweep", "evaluate a scenario along its axis")):
        _add_common(sub.add_parser(name, help=help_))
    opt = sub.add_parser("optimize", help="optimal time or drive amplitude")
    _add_common(opt)
    opt.add_argument("--objective", choices=OBJECTIVES)
    opt.add_argument("--search", choices=["time", "omega"])
    opt.add_argument("--window", type=float, nargs=2, metavar=("START", "STOP"))
    opt.add_argument("--omega-step", dest="omega_step", type=float)
    opt.add_argument("--omega-span", dest="omega_span", type=float)
    lp = sub.add_parser("list-presets", help="show built-in scenarios")
    lp.add_argument("--json", action="store_true", help="machine-readable output")
    return parser


def _config(args) -> RunConfig:
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    file_data = load_json(args.config) if args.config else None
    cfg = resolve(args.command, file_data, flags)
    if cfg.scenario is None and not (args.command == "optimize" and cfg.search == "omega"):
        raise ConfigError("no system given: use --preset, --config or --gamma/--omega/--J")
    return cfg


def _out_root(cfg: RunConfig) -> Path:
    return Path(cfg.output or os.environ.get(OUT_ENV) or "out")


def cmd_simulate(cfg: RunConfig) -> int:
    if cfg.scenario.axis != "time":
        raise ConfigError(f"scenario {cfg.scenario.name!r} sweeps {cfg.scenario.axis}; use the sweep command")
    return cmd_sweep(cfg)


def cmd_sweep(cfg: RunConfig) -> int:
    result = run_scenario(cfg.scenario, cfg.thresholds, cfg.norm_floor)
    files = write_result(result, cfg, _out_root(cfg))
    for path in files:
        print(path)
    if result.trajectory is not None and result.trajectory.terminated_at is not None:
        print(f"post-selection probability vanished at t={result.trajectory.terminated_at}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_optimize(cfg: RunConfig) -> int:
    if cfg.search == "omega":
        sh = cfg.shorthand
        if cfg.scenario is not None and "gamma" not in sh:
            q = cfg.scenario.qubits[0]
            gamma = q.gamma
        else:
            gamma = sh.get("gamma")
        if gamma is None:
            raise ConfigError("gamma: required for --search omega")
        J = sh.get("J")
        topology = sh.get("topology") or "all_to_all"
        n = int(sh.get("n") or 3)
        if J is None and cfg.scenario is not None:
            J = float(np.max(cfg.scenario.coupling.J))
        try:
            best = find_optimal_drive(float(gamma), topology, float(J or 0.0), cfg.window, n,
                                      cfg.omega_step, cfg.omega_span, floor=cfg.norm_floor)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        out = {"t_star": best.t, "omega_star": best.omega, "value": best.value,
               "objective": "max_tau" if n == 3 else "max_concurrence"}
    else:
        s = cfg.scenario
        if cfg.window is not None and not 0 <= cfg.window[0] < cfg.window[1]:
            raise ConfigError(f"window: empty interval {cfg.window}")
        try:
            t, value = find_optimal_time(s, cfg.window, cfg.objective, floor=cfg.norm_floor)
        except OptimumNotFound:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        omega = s.qubits[0].omega if len({q.omega for q in s.qubits}) == 1 else [q.omega for q in s.qubits]
        out = {"t_star": t, "omega_star": omega, "value": value, "objective": cfg.objective,
               "scenario": s.name}
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


def cmd_list_presets(as_json: bool = False) -> int:
    if as_json:
        print(json.dumps([{"name": s.name, "description": s.description} for s in PRESETS.values()], indent=1))
    else:
        width = max(map(len, PRESETS))
        for s in PRESETS.values():
            print(f"{s.name:<{width}}  {s.description}")
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "list-presets":
        return cmd_list_presets(args.json)
    try:
        cfg = _config(args)
        handler = {"simulate": cmd_simulate, "sweep": cmd_sweep, "optimize": cmd_optimize}[args.command]
        return handler(cfg)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PostSelectionError, np.linalg.LinAlgError, OptimumNotFound) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
