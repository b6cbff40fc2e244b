"""Command line entry point: plot <csv>... --out <dir> --format <png|pdf>."""

import argparse
import json
import os
import sys

from .data import SchemaError, build_series, read_results
from .render import make_spec, render

EXIT_BAD_INPUT = 2


def build_parser():
    p = argparse.ArgumentParser(
        prog="plot",
        description="Render sum-rate-vs-SNR figures from sweep result CSVs.",
    )
    p.add_argument("csv", nargs="+", help="sweep result CSV file(s); multiple "
                   "files are merged and grouped by channel model")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--format", choices=("png", "pdf"), default="png")
    p.add_argument("--dump-data", action="store_true",
                   help="print the plotted data series as JSON and render nothing")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.dump_data:
            series = build_series(read_results(args.csv))
            json.dump(series, sys.stdout, indent=2)
            print()
            return 0
        os.makedirs(args.out, exist_ok=True)
        for path in render(make_spec(args.csv, args.format), args.out):
            print(path)
        return 0
    except (SchemaError, OSError, ValueError) as exc:
        print(f"plot error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
