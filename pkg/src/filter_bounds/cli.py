"""Command line interface.

Subcommands reproduce the three benchmark experiments and expose the full
pipeline on explicit configurations::

    filter-bounds fig1 --tv-grid 0.05:1.0:0.01 --out fig1.csv
    filter-bounds fig2 --targets 0.1,0.25,0.5,0.75 --grid 0.05:1.0:0.01 --out fig2.csv
    filter-bounds fig3 --count 1000 --probes product --target-tv 0.5 --seed 7 --out fig3.csv
    filter-bounds custom --config cfg.json

CSV output uses 12 significant digits and is byte-identical for identical
configuration and seed.  ``FILTER_BOUNDS_THREADS`` caps fig3 parallelism.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import (
    FIG1_COLUMNS,
    FIG2_COLUMNS,
    FIG3_COLUMNS,
    ConfigError,
    parse_grid,
    run_custom,
    run_fig1,
    run_fig2,
    run_fig3,
    write_csv,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="filter-bounds",
        description="Process-fidelity bounds for probabilistic quantum filters",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("fig1", help="lower-bound tightness scan for an ideal filter")
    p1.add_argument("--tv-grid", default="0.05:1.0:0.01", help="start:stop:step grid for T_V")
    p1.add_argument("--probes", default="product", choices=["product", "eigen"])
    p1.add_argument("--out", required=True, help="output CSV path")

    p2 = sub.add_parser("fig2", help="bound vs actual transmittance for fixed targets")
    p2.add_argument("--targets", default="0.1,0.25,0.5,0.75", help="comma-separated target T_V values")
    p2.add_argument("--grid", default="0.05:1.0:0.01", help="start:stop:step grid for actual T_V")
    p2.add_argument("--probes", default="product", choices=["product", "eigen"])
    p2.add_argument("--out", required=True)

    p3 = sub.add_parser("fig3", help="random-channel benchmark with SDP bounds")
    p3.add_argument("--count", type=int, default=1000)
    p3.add_argument("--probes", default="product", choices=["product", "eigen"])
    p3.add_argument("--target-tv", type=float, default=0.5)
    p3.add_argument("--seed", type=int, default=12345)
    p3.add_argument("--slack", type=float, default=0.0)
    p3.add_argument("--out", required=True)

    pc = sub.add_parser("custom", help="full pipeline on a JSON configuration")
    pc.add_argument("--config", required=True, help="JSON config path")
    pc.add_argument("--out", default=None, help="report path (default: stdout)")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fig1":
            rows = run_fig1(parse_grid(args.tv_grid), probes=args.probes)
            write_csv(args.out, FIG1_COLUMNS, rows)
        elif args.command == "fig2":
            targets = [float(t) for t in args.targets.split(",") if t]
            rows = run_fig2(targets, parse_grid(args.grid), probes=args.probes)
            write_csv(args.out, FIG2_COLUMNS, rows)
        elif args.command == "fig3":
            rows = run_fig3(
                args.count,
                args.probes,
                target_tv=args.target_tv,
                seed=args.seed,
                slack=args.slack,
            )
            write_csv(args.out, FIG3_COLUMNS, rows)
        elif args.command == "custom":
            with open(args.config) as fh:
                config = json.load(fh)
            report = run_custom(config)
            text = json.dumps(report, indent=2)
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text + "\n")
            else:
                print(text)
    except (ConfigError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
