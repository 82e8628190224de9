"""Command line entry point: ``xxchain {simulate,sweep,figures,oracle}``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import NumericalValidityError, ParameterError

EXIT_OK, EXIT_PARAMETER, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3


def _parse_axis(text):
    from .experiments.config import parse_value

    if "=" not in text:
        raise ParameterError(f"axis must look like name=v1,v2,...; got {text!r}")
    name, values = text.split("=", 1)
    name = name.strip()
    parsed = tuple(parse_value(name, v.strip()) for v in values.split(",") if v.strip())
    return name, parsed


def _base_config(path):
    from .experiments.config import RunConfig, load_config

    return load_config(path) if path else RunConfig()


def cmd_simulate(args):
    from .experiments.io import emit_plot_data

    cfg = _base_config(args.config)
    if args.no_measure:
        cfg = cfg.with_values(measure=False)
    if args.tau is not None:
        cfg = cfg.with_values(measure=True, tau=args.tau)
    record = cfg.run()
    if record.zeno_warning:
        print("warning: tau <= 1/J', expect Zeno freezing", file=sys.stderr)
    out = Path(args.out) / cfg.label
    emit_plot_data({"trajectory": record}, out, extra={"config": cfg.to_flat()})
    s = record.summary()
    print(f"max_concurrence={s['max_concurrence']:.6f} t_of_max={s['t_of_max']:g} "
          f"measurements={s['n_measurements']} -> {out}")
    return EXIT_OK


def cmd_sweep(args):
    from .experiments.io import write_meta, write_table_csv
    from .experiments.sweep import SweepSpec, sweep, sweep_table

    cfg = _base_config(args.config)
    spec = SweepSpec(cfg, tuple(_parse_axis(a) for a in args.axis or ()))
    table = sweep_table(sweep(spec, workers=args.threads))
    out = Path(args.out) / cfg.label
    write_table_csv(table, out / "sweep.csv")
    write_meta(out / "meta.json", base=cfg.to_flat(),
               axes=[[n, list(v)] for n, v in spec.axes], table=table)
    for row in table:
        print(" ".join(f"{k}={v}" for k, v in row.items()))
    return EXIT_OK


def cmd_figures(args):
    from .experiments.scenarios import SCENARIOS, run_scenario

    if args.all:
        names = SCENARIOS
    elif args.name:
        if args.name not in SCENARIOS:
            raise ParameterError(f"unknown scenario {args.name!r}; choose from {SCENARIOS}")
        names = (args.name,)
    else:
        raise ParameterError("give --name figN or --all")
    for name in names:
        _, _, files = run_scenario(name, args.out, workers=args.threads,
                                   log=lambda m: print(m, file=sys.stderr))
        print(f"{name}: {len(files)} files in {Path(args.out) / name}")
    return EXIT_OK


def cmd_oracle(args):
    from .experiments.oracles import oracle_check

    report = oracle_check(args.kind)
    print(report.line())
    return EXIT_OK if report.passed else EXIT_NUMERICAL


def build_parser():
    from .experiments.oracles import KINDS

    parser = argparse.ArgumentParser(prog="xxchain", description=__doc__)
    parser.add_argument("--threads", type=int, default=1, help="worker processes for sweeps")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one trajectory")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--no-measure", action="store_true")
    p.add_argument("--tau", type=float, help="measurement interval; enables measurement")
    p.add_argument("--out", default="results")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="grid sweep over whitelisted parameters")
    p.add_argument("--config")
    p.add_argument("--axis", action="append", help="name=v1,v2,... (repeatable)")
    p.add_argument("--out", default="results")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figures", help="regenerate figure data")
    p.add_argument("--name")
    p.add_argument("--all", action="store_true")
    p.add_argument("--out", default="results")
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("oracle", help="run a brute-force cross-check")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_PARAMETER
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except NumericalValidityError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
