"""Regenerate the plot data for one or all figure scenarios.

Usage: python scripts/make_figures.py --name fig3 [--out results] [--workers 2]
       python scripts/make_figures.py --all
"""
import argparse
import sys
import time

from xxchain.experiments.scenarios import SCENARIOS, run_scenario


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--name", choices=SCENARIOS)
    group.add_argument("--all", action="store_true")
    parser.add_argument("--out", default="results")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    names = SCENARIOS if args.all else (args.name,)
    for name in names:
        t0 = time.perf_counter()
        records, tables, files = run_scenario(name, args.out, workers=args.workers,
                                              log=lambda m: print(m, file=sys.stderr))
        for curve, rec in records.items():
            print(f"{name}/{curve}: max C = {rec.max_concurrence:.4f} at t = {rec.t_of_max:g}")
        for table, rows in tables.items():
            for row in rows:
                print(f"{name}/{table}: " + ", ".join(f"{k}={v}" for k, v in row.items()))
        print(f"{name}: {len(files)} files, {time.perf_counter() - t0:.0f} s")


if __name__ == "__main__":
    main()
