"""Command-line entry point: ``z2lpg <subcommand> [options]``.

Exit codes: 0 success, 2 configuration error, 3 capacity error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import CapacityError
from .experiments import ConfigError, dump_config, list_presets, parse_config_text, resolve_config, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY = 0, 2, 3


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", help="named preset (see the presets subcommand)")
    p.add_argument("--config", type=Path, help="YAML config file; merged over the preset")
    p.add_argument("--out", type=Path, default=None, help="output directory (default: current directory)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--jobs", type=int, default=1, help="worker processes for independent runs")
    p.add_argument("--V", type=_float_list, help="comma-separated protection strengths; replaces the run list")
    p.add_argument("--lambda", dest="lam", type=float, help="error strength")
    p.add_argument("--dt", type=float, help="Trotter step (scan-v: replaces dt_list)")
    p.add_argument("--steps", type=int, help="number of Trotter steps")
    p.add_argument("--L", type=int, help="number of matter sites (sequence-audit: single L)")
    p.add_argument("--seq", help="sequence preset name or comma-separated rationals")
    p.add_argument("--print-config", action="store_true", help="print the resolved config and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="z2lpg", description="Gauge-protected quench experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "quench-analog": "continuous-time quench by exact propagation",
        "quench-circuit": "first-order Trotter circuit quench",
        "scan-v": "final gauge violation versus protection strength",
        "sequence-audit": "compliance and resonant-fraction table for a sequence",
    }
    for name, text in helps.items():
        _add_common(sub.add_parser(name, help=text))
    sub.add_parser("presets", help="list shipped presets")
    return parser


def _overrides(args, kind: str) -> dict:
    ov: dict = {}
    if args.V is not None:
        ov["V"] = args.V
    if args.lam is not None:
        ov.setdefault("model", {})["lam"] = args.lam
    if args.dt is not None:
        ov.setdefault("circuit", {})["dt"] = args.dt
        if kind == "scan-v":
            ov["dt_list"] = [args.dt]
    if args.steps is not None:
        ov.setdefault("circuit", {})["n_steps"] = args.steps
    if args.L is not None:
        if kind == "sequence-audit":
            ov["L_range"] = [args.L, args.L, 1]
        else:
            ov.setdefault("lattice", {})["L"] = args.L
    if args.seq is not None:
        ov["sequence"] = args.seq
    if args.format is not None:
        ov.setdefault("output", {})["format"] = args.format
    if args.out is not None:
        ov.setdefault("output", {})["path"] = str(args.out)
    return ov


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "presets":
        for name, desc in list_presets().items():
            print(f"{name:22s} {desc}")
        return EXIT_OK
    try:
        file_cfg = parse_config_text(args.config.read_text()) if args.config else {}
        if file_cfg and file_cfg.get("kind") not in (None, args.command):
            raise ConfigError(f"config kind {file_cfg['kind']!r} does not match subcommand {args.command!r}", "kind")
        ov = _overrides(args, args.command)
        if not args.preset and "kind" not in file_cfg:
            ov["kind"] = args.command
        cfg = resolve_config(args.preset, file_cfg, ov)
        if cfg["kind"] != args.command:
            raise ConfigError(f"preset is a {cfg['kind']} experiment, not {args.command}", "kind")
        if args.print_config:
            sys.stdout.write(dump_config(cfg))
            return EXIT_OK
        if args.jobs < 1:
            raise ConfigError("must be at least 1", "jobs")
        paths = run_experiment(cfg, cfg["output"]["path"], cfg["output"]["format"], args.jobs)
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
