"""Command-line figure pipeline.

    plots --input DIR --out DIR [--format svg|png] [--experiment NAME]

Reads only the CSV and JSON summary files written by the tvgames experiment
runner; never modifies its inputs. Exit codes: 0 ok, 1 usage/schema error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .render import SchemaError, discover_figures, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plots", description=__doc__)
    parser.add_argument("--input", required=True,
                        help="directory of tvgames run/sweep outputs")
    parser.add_argument("--out", required=True, help="directory for figures")
    parser.add_argument("--format", choices=("svg", "png"), default="svg")
    parser.add_argument("--experiment", default=None,
                        help="only render this experiment name")
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code not in (0, None) else 0

    if not os.path.isdir(args.input):
        print(f"i/o error: input directory {args.input!r} not found",
              file=sys.stderr)
        return 3
    try:
        os.makedirs(args.out, exist_ok=True)
        specs = discover_figures(args.input, args.out, fmt=args.format,
                                 experiment=args.experiment)
        if not specs:
            print(f"error: nothing to render under {args.input!r}",
                  file=sys.stderr)
            return 1
        for spec in specs:
            for path in render(spec):
                print(f"wrote {path}")
        return 0
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (IOError, OSError) as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
