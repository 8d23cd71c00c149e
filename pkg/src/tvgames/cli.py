"""Command-line front end.

    tvgames run <name> [--set key=value]... [--out DIR] [--seed N]
    tvgames list
    tvgames sweep <name> --grid key=v1,v2,... [--grid ...] [--out DIR]
                  [--seed N] [--set key=value]... [--workers N]
    tvgames check <trace.csv | trace.trace.json>

The TVGAMES_OUT environment variable sets the default output directory.
Exit codes: 0 ok, 1 usage error, 2 theorem-margin violation, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import (check_stored, default_out_dir, list_experiments,
                          run_named, sweep)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MARGIN = 2
EXIT_IO = 3


def _parse_sets(pairs):
    overrides = {}
    for item in pairs or []:
        if "=" not in item:
            raise ValueError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k] = v
    return overrides


def _parse_grid(specs):
    grid = {}
    for item in specs or []:
        if "=" not in item:
            raise ValueError(f"--grid expects key=v1,v2,..., got {item!r}")
        k, vs = item.split("=", 1)
        vals = []
        for v in vs.split(","):
            try:
                vals.append(json.loads(v))
            except (ValueError, TypeError):
                vals.append(v)
        grid[k] = vals
    return grid


def _print_summary(s):
    print(f"[{s.name}] seed={s.seed} kind={s.kind} T={s.T} "
          f"cum_gap_sq={s.cum_gap_sq:.6g} final_gap={s.final_gap:.3e} "
          f"wall={s.wall_clock:.2f}s")
    for c in s.checks:
        flag = "ok" if c["ok"] else "VIOLATED"
        gate = "" if c["applicable"] else " (hypothesis not met; not gated)"
        print(f"  check {c['name']:24s} margin={c['margin']:+.3e} {flag}{gate}")
    for k, v in s.extras.items():
        print(f"  {k}: {v}")
    if s.files:
        print(f"  wrote {s.files['csv']}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="tvgames", description=__doc__)
    sub = parser.add_subparsers(dest="cmd")

    p_run = sub.add_parser("run", help="run a named experiment")
    p_run.add_argument("name")
    p_run.add_argument("--set", action="append", dest="sets", metavar="K=V")
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--seed", type=int, default=None)

    sub.add_parser("list", help="list the registered experiments")

    p_sweep = sub.add_parser("sweep", help="cross-product sweep of overrides")
    p_sweep.add_argument("name")
    p_sweep.add_argument("--grid", action="append", dest="grids",
                         metavar="K=V1,V2,...")
    p_sweep.add_argument("--set", action="append", dest="sets", metavar="K=V")
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--seed", type=int, default=1)
    p_sweep.add_argument("--workers", type=int, default=None)

    p_check = sub.add_parser("check", help="re-run checkers on a stored trace")
    p_check.add_argument("path")

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    if args.cmd is None:
        parser.print_help()
        return EXIT_USAGE

    try:
        if args.cmd == "list":
            for name in list_experiments():
                print(name)
            return EXIT_OK

        if args.cmd == "run":
            overrides = _parse_sets(args.sets)
            summary = run_named(args.name, overrides=overrides, seed=args.seed,
                                out_dir=args.out or default_out_dir())
            _print_summary(summary)
            return EXIT_OK if summary.ok else EXIT_MARGIN

        if args.cmd == "sweep":
            grid = _parse_grid(args.grids)
            overrides = _parse_sets(args.sets)
            summaries = sweep(args.name, grid, base_seed=args.seed,
                              out_dir=args.out or default_out_dir(),
                              workers=args.workers, overrides=overrides)
            bad = 0
            for s in summaries:
                _print_summary(s)
                bad += 0 if s.ok else 1
            print(f"sweep: {len(summaries)} cells, {bad} with violations")
            return EXIT_OK if bad == 0 else EXIT_MARGIN

        if args.cmd == "check":
            ok, msgs = check_stored(args.path)
            for m in msgs:
                print(m)
            return EXIT_OK if ok else EXIT_MARGIN

    except (KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (IOError, OSError) as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
