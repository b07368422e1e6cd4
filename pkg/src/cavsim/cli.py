"""Command-line entry point.

    cavsim run <scenario|config.json> [--seed S] [--out DIR] [--workers W]
               [--scale-ensemble F] [--scale-time F] [--scale-atoms F] [--force]
    cavsim list-scenarios
    cavsim validate <config-path>

Exit codes: 0 success, 2 configuration error, 3 runtime error. The
CAVSIM_OUT environment variable sets the base output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .config import ConfigError, RunConfig, build_run_scenarios, parse_config
from .output import write_outputs
from .scenarios import CATALOG, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavsim",
        description="Semiclassical cavity self-organization simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a catalog scenario or a config file")
    run.add_argument("target", help="scenario name or path to a JSON config")
    run.add_argument("--seed", type=int, default=None, help="master seed override")
    run.add_argument("--out", default=None, help="output bundle directory")
    run.add_argument("--workers", type=int, default=None, help="parallel worker count")
    run.add_argument("--scale-ensemble", type=float, default=None, metavar="F")
    run.add_argument("--scale-time", type=float, default=None, metavar="F")
    run.add_argument("--scale-atoms", type=float, default=None, metavar="F")
    run.add_argument("--force", action="store_true", help="overwrite an existing bundle")

    sub.add_parser("list-scenarios", help="list catalog scenarios")

    val = sub.add_parser("validate", help="validate a config file")
    val.add_argument("config_path", help="path to a JSON config")

    return parser


def _load_config(target: str) -> RunConfig:
    path = Path(target)
    if path.exists():
        return parse_config(path.read_text(encoding="utf-8"))
    if target in CATALOG:
        return parse_config(json.dumps({"scenario": target}))
    raise ConfigError(
        f"{target!r} is neither a config file nor a scenario name; "
        f"available scenarios: {', '.join(sorted(CATALOG))}"
    )


def _apply_flags(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    from .scenarios import DEFAULT_SEED

    if args.seed is not None:
        config.master_seed = args.seed
        config.provenance["master_seed"] = (
            "user" if args.seed != DEFAULT_SEED else "default"
        )
    for attr, key in (
        ("scale_ensemble", "scale.ensemble"),
        ("scale_time", "scale.time"),
        ("scale_atoms", "scale.atoms"),
    ):
        value = getattr(args, attr)
        if value is not None:
            if not value > 0:
                raise ConfigError(f"{key}: must be > 0, got {value}")
            setattr(config, attr, value)
            config.provenance[key] = "user" if value != 1.0 else "default"
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError(f"workers: must be >= 1, got {args.workers}")
        config.workers = args.workers
    if args.out is not None:
        config.out_dir = args.out
    if args.force:
        config.force = True
    return config


def _default_out_dir(config: RunConfig) -> str:
    base = os.environ.get("CAVSIM_OUT", "cavsim_runs")
    return str(Path(base) / f"{config.kind}_seed{config.master_seed}")


def _cmd_run(args: argparse.Namespace) -> int:
    config = _apply_flags(_load_config(args.target), args)
    scenarios = build_run_scenarios(config)
    out_dir = config.out_dir or _default_out_dir(config)

    t_start = time.perf_counter()
    runs = []
    for sc in scenarios:
        print(
            f"[cavsim] {sc.name}: N={sc.params.n_atoms} "
            f"trajectories={sc.spec.n_trajectories} t_end={sc.cfg.t_end:g} "
            f"workers={config.workers}",
            flush=True,
        )
        runs.append((sc, run_scenario(sc, workers=config.workers)))
    wall = time.perf_counter() - t_start

    root = write_outputs(runs, config, out_dir)
    print(f"[cavsim] wrote {root} ({len(runs)} run(s), {wall:.1f} s)")
    for sc, res in runs:
        final = res.final_theta
        print(
            f"[cavsim]   {sc.name}: mean final theta "
            f"{float(final.mean()):+.4f}, odd fraction "
            f"{float((final < 0).mean()):.3f}"
        )
    return EXIT_OK


def _cmd_list() -> int:
    width = max(len(name) for name in CATALOG)
    for name in sorted(CATALOG):
        _, arg_names, blurb = CATALOG[name]
        suffix = f" (args: {', '.join(arg_names)})" if arg_names else ""
        print(f"{name:<{width}}  {blurb}{suffix}")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    path = Path(args.config_path)
    if not path.exists():
        raise ConfigError(f"{path}: no such file")
    config = parse_config(path.read_text(encoding="utf-8"))
    scenarios = build_run_scenarios(config)
    print(f"config OK: scenario {config.kind!r}, {len(scenarios)} run(s)")
    for sc in scenarios:
        print(
            f"  {sc.name}: N={sc.params.n_atoms} trajectories={sc.spec.n_trajectories} "
            f"t_end={sc.cfg.t_end:g} dt={sc.params.dt:g} scheme={sc.cfg.scheme}"
        )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list-scenarios":
            return _cmd_list()
        if args.command == "validate":
            return _cmd_validate(args)
        raise AssertionError(f"unhandled command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
