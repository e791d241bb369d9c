"""
Command-line entry point: qnetlab run|sweep|capacity|validate|presets list|serve
"""
import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from .errors import ConfigError, QnetlabError
from .harness.config import Experiment, apply_overrides, experiment_from_dict, load_config
from .harness.output import dump_json
from .harness.presets import list_presets, preset_config
from .harness.runner import admissibility, run_experiment, sweep, validate_cmd

logger = logging.getLogger("qnetlab")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--config", type=Path, help="experiment YAML file")
    source.add_argument("--preset", help="built-in experiment preset")
    common.add_argument("--seed", type=int)
    common.add_argument("--slots", type=int, help="horizon T")
    common.add_argument("--replications", type=int)
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--quiet", action="store_true", help="log warnings and errors only")
    common.add_argument("--allow-unvalidated", action="store_true",
                        help="simulate even if the potential fails its checks")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="qnetlab", description="Constrained queueing network lab")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="simulate an experiment")
    sw = sub.add_parser("sweep", parents=[common], help="run the experiment over a load grid")
    sw.add_argument("--grid", required=True, help="comma-separated load multipliers, e.g. 0.5,0.9,1.1")
    sub.add_parser("capacity", parents=[common], help="admissibility verdict, margin and witness")
    sub.add_parser("validate", parents=[common], help="check topology, potential and load")
    presets = sub.add_parser("presets", help="built-in experiments")
    presets.add_argument("action", choices=["list"])
    serve = sub.add_parser("serve", help="start the HTTP and MCP service")
    serve.add_argument("--host", default="0.0.0.0")
    serve.add_argument("--port", type=int, default=int(os.getenv("PORT", "8000")))
    return parser


def parse_grid(text: str) -> List[float]:
    try:
        grid = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigError(f"invalid --grid {text!r}: {e}") from e
    if not grid or any(v <= 0 for v in grid):
        raise ConfigError(f"--grid needs positive load multipliers, got {text!r}")
    return grid


def experiment_from_args(args: argparse.Namespace) -> Experiment:
    if args.config is not None:
        data, base_dir = load_config(args.config), args.config.parent
    elif args.preset is not None:
        data, base_dir = preset_config(args.preset), None
    else:
        raise ConfigError("give --config <file> or --preset <name>")
    data = apply_overrides(data, args.seed, args.slots, args.replications, args.out)
    if args.allow_unvalidated:
        data["allow_unvalidated"] = True
    return experiment_from_dict(data, base_dir)


def _configure_logging(quiet: bool):
    level = "WARNING" if quiet else os.getenv("QNETLAB_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def _print_capacity(exp: Experiment):
    adm = admissibility(exp)
    margin = "inf" if adm.unbounded else f"{adm.margin:.6g}"
    print(f"verdict: {adm.verdict}")
    print(f"margin:  {margin}")
    print(f"workload: {np.array2string(adm.workload, precision=6)}")
    print("witness:")
    print(f"  {'state':<12} {'pi':>8}  {'vertex':>6}  {'weight':>10}  vector")
    for p, w, r in zip(adm.pi, adm.witness, adm.regions):
        for vid in np.flatnonzero(w > 1e-12):
            print(f"  {r.label:<12} {p:>8.4f}  {vid:>6d}  {w[vid]:>10.6f}  {r.vertices[vid].tolist()}")


def _print_sweep(rows):
    print(f"{'rho':>8} {'margin':>10} {'verdict':<20} {'mean_l1':>12} {'slope':>12} classification")
    for row in rows:
        if row.error:
            print(f"{row.rho:>8g} {'-':>10} {'-':<20} {'-':>12} {'-':>12} error: {row.error}")
            continue
        margin = "inf" if row.margin is None else f"{row.margin:.4g}"
        slope = "-" if row.slope is None else f"{row.slope:.3e}"
        print(f"{row.rho:>8g} {margin:>10} {row.verdict:<20} {row.mean_backlog:>12.3f} {slope:>12} {row.classification}")


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "presets":
        for p in list_presets():
            print(f"{p['name']:<24} {p['description']}")
        return EXIT_OK
    if args.command == "serve":
        import uvicorn

        uvicorn.run("qnetlab.server:app", host=args.host, port=args.port)
        return EXIT_OK

    exp = experiment_from_args(args)
    if args.command == "run":
        summary = run_experiment(exp)
        print(dump_json(summary.to_dict()["merged"]), end="")
        if summary.output_dir is not None:
            print(f"outputs: {summary.output_dir}")
        return EXIT_OK
    if args.command == "sweep":
        _print_sweep(sweep(exp, parse_grid(args.grid)))
        return EXIT_OK
    if args.command == "capacity":
        _print_capacity(exp)
        return EXIT_OK
    if args.command == "validate":
        report = validate_cmd(exp)
        print(dump_json(report.to_dict()), end="")
        for w in report.warnings:
            logger.warning(w)
        return report.exit_code
    raise ConfigError(f"unknown command {args.command!r}")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(getattr(args, "quiet", False))
    try:
        return dispatch(args)
    except ConfigError as e:
        logger.error("configuration error: %s", e)
        return EXIT_CONFIG
    except QnetlabError as e:
        logger.error("runtime fault: %s", e)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
