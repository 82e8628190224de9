"""Max end-to-end concurrence without measurement, with non-selective and with
selective (empty-channel post-selected) measurement, for one parameter set.

Usage: python scripts/compare_modes.py --n-sites 10 --n-bar 0.05 0.1 --gamma 0.02 --tau 150
"""
import argparse
import time

from xxchain.experiments import RunConfig


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-sites", type=int, default=10)
    p.add_argument("--n-bar", type=float, nargs="+", default=[0.05, 0.1])
    p.add_argument("--gamma", type=float, default=0.02)
    p.add_argument("--kind", default="dissipation", choices=["dissipation", "dephasing"])
    p.add_argument("--tau", type=float, default=150.0)
    p.add_argument("--horizon", type=float, default=None)
    args = p.parse_args(argv)

    print(f"{'n_bar':>6} {'mode':>13} {'max C':>8} {'t_max':>7} {'success':>9} {'secs':>5}")
    for n_bar in args.n_bar:
        base = RunConfig().with_values(n_sites=args.n_sites, gamma=args.gamma, n_bar=n_bar,
                                       noise_kind=args.kind, tau=args.tau, horizon=args.horizon)
        for mode in ("off", "nonselective", "selective"):
            cfg = base if mode == "off" else base.with_values(measure=True, mode=mode)
            t0 = time.perf_counter()
            rec = cfg.run()
            print(f"{n_bar:6.3f} {mode:>13} {rec.max_concurrence:8.4f} {rec.t_of_max:7.0f} "
                  f"{rec.cumulative_success:9.2e} {time.perf_counter() - t0:5.0f}", flush=True)


if __name__ == "__main__":
    main()
