"""Command-line interface.

Subcommands::

    coarraykit design   --K 10 --kind emisc [--out report.json]
    coarraykit curves   --K-min 10 --K-max 40 --kinds emisc ula nested [--out curves.csv]
    coarraykit rmse     --config experiment.cfg [--seed 42 --trials 100 --out rmse.csv]
    coarraykit spectrum --geometry emisc:10 --bearings -30,0,30 --snr-db 10 [--out spec.csv]

Exit status is nonzero only for hard errors; per-row soft failures are
recorded inside the CSV as ``#``-prefixed comment lines.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .estimation import MusicConfig, estimate_doas, smoothed_matrix, spectrum_csv_lines
from .coarray import difference_coarray
from .geometry import KINDS, parse_geometry
from .harness import (
    curves_csv,
    default_coupling,
    design_report_lines,
    load_config,
    rmse_csv,
    run_curves,
    run_design_report,
    run_rmse_sweep,
)
from .signals import SourceScenario, coarray_pseudo_snapshot, sample_covariance, simulate_snapshots


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed override")
    common.add_argument("--trials", type=int, default=None, help="Monte Carlo trials override")
    common.add_argument("--out", type=str, default=None, help="output path (default stdout)")
    common.add_argument("--threads", type=int, default=None, help="worker threads for trials")

    parser = argparse.ArgumentParser(prog="coarraykit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_design = sub.add_parser("design", parents=[common], help="single-array design report")
    p_design.add_argument("--K", type=int, required=True, help="number of elements")
    p_design.add_argument("--kind", choices=[k for k in KINDS if k != "custom"], default="emisc")
    p_design.add_argument("--u1-mag", type=float, default=0.3)
    p_design.add_argument("--u1-phase", type=float, default=None,
                          help="arg(u1) in radians (default pi/3)")
    p_design.add_argument("--band-limit", type=int, default=100)
    p_design.add_argument("--json", action="store_true", help="print JSON instead of text")

    p_curves = sub.add_parser("curves", parents=[common], help="uDOF / CL versus K sweep")
    p_curves.add_argument("--K-min", type=int, required=True)
    p_curves.add_argument("--K-max", type=int, required=True)
    p_curves.add_argument("--kinds", nargs="+", default=["emisc", "ula", "nested", "coprime"])

    p_rmse = sub.add_parser("rmse", parents=[common], help="Monte Carlo RMSE sweep from a config")
    p_rmse.add_argument("--config", type=str, required=True)

    p_spec = sub.add_parser("spectrum", parents=[common], help="dump one MUSIC pseudo spectrum")
    p_spec.add_argument("--geometry", type=str, required=True,
                        help="spec like emisc:10, or a serialized line like 'custom 3 0,1,4'")
    p_spec.add_argument("--bearings", type=str, required=True,
                        help="comma-separated degrees; use --bearings=-20,15 for leading minus")
    p_spec.add_argument("--snr-db", type=float, default=10.0)
    p_spec.add_argument("--snapshots", type=int, default=1000)
    p_spec.add_argument("--u1-mag", type=float, default=0.0)
    p_spec.add_argument("--grid-points", type=int, default=18001)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "design":
            return _cmd_design(args)
        if args.command == "curves":
            return _cmd_curves(args)
        if args.command == "rmse":
            return _cmd_rmse(args)
        if args.command == "spectrum":
            return _cmd_spectrum(args)
        raise AssertionError(f"unhandled command {args.command}")
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _cmd_design(args) -> int:
    kwargs = {"u1_mag": args.u1_mag, "band_limit": args.band_limit}
    if args.u1_phase is not None:
        kwargs["u1_phase_rad"] = args.u1_phase
    report = run_design_report(args.K, args.kind, coupling=default_coupling(**kwargs))
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2) + "\n")
    if args.json and not args.out:
        print(json.dumps(report, indent=2))
    else:
        for line in design_report_lines(report):
            print(line)
    return 0


def _cmd_curves(args) -> int:
    if args.K_max < args.K_min:
        raise ValueError(f"--K-max ({args.K_max}) must be >= --K-min ({args.K_min})")
    rows, errors = run_curves(range(args.K_min, args.K_max + 1), args.kinds)
    _emit(curves_csv(rows, errors), args.out)
    return 0


def _cmd_rmse(args) -> int:
    config = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.out is not None:
        overrides["out"] = args.out
    if overrides:
        config = replace(config, **overrides)
    rows = run_rmse_sweep(config)
    _emit(rmse_csv(rows), config.out)
    return 0


def _cmd_spectrum(args) -> int:
    geometry = parse_geometry(args.geometry)
    bearings = tuple(float(b) for b in args.bearings.split(","))
    scenario = SourceScenario(
        bearings_deg=bearings,
        snr_db=args.snr_db,
        snapshots=args.snapshots,
        seed=args.seed if args.seed is not None else 0,
    )
    coupling = default_coupling(args.u1_mag) if args.u1_mag > 0 else None
    snapshots = simulate_snapshots(geometry, scenario, coupling)
    pseudo = coarray_pseudo_snapshot(sample_covariance(snapshots), geometry)
    halfwidth = difference_coarray(geometry).consecutive_halfwidth
    config = MusicConfig(num_sources=len(bearings), grid_points=args.grid_points)
    result = estimate_doas(
        smoothed_matrix(pseudo, halfwidth), config,
        trial_seed=scenario.seed, keep_spectrum=True,
    )
    lines = ["angle_deg,pseudo_spectrum"] + spectrum_csv_lines(result)
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    raise SystemExit(main())
