"""make-figure <kind> <inputs...> -o <file>

Inputs are run directories (series.csv + meta.json + summary.json) or
run.json bundles produced by the simulator CLI; kinds are timeseries,
scaling and scan.
"""

from __future__ import annotations

import argparse
import sys

from .io import DataError, SchemaError, load_run
from .render import KINDS, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="make-figure")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("inputs", nargs="+", help="run directories or run.json files")
    parser.add_argument("-o", "--out", required=True, help="output image path (png/pdf/svg)")
    parser.add_argument("--no-shade", action="store_true",
                        help="timeseries only: skip the absorption/emission shading")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        runs = [load_run(p) for p in args.inputs]
        options = {}
        if args.kind == "timeseries":
            options["shade_regions"] = not args.no_shade
        render(args.kind, runs, args.out, **options)
    except (SchemaError, DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
