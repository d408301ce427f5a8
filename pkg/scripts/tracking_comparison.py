#!/usr/bin/env python3
"""Paired tracking experiment: run lloyd, tvd_c, and tvd_dk(1) on the same
moving density from identical CVT starts; report peak tracking errors and
optionally dump the trace CSVs.

Usage: python scripts/tracking_comparison.py [--density phi2] [--out-dir traces/]
"""

import argparse
import pathlib

from coverage_control.sim import Scenario, run_controller_comparison


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--density", default="phi2")
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--dt", type=float, default=0.005)
    ap.add_argument("--t-final", type=float, default=50.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default=None,
                    help="write one trace CSV per controller into this directory")
    args = ap.parse_args()

    base = Scenario(density=args.density, n=args.n, dt=args.dt,
                    t_final=args.t_final, seed=args.seed,
                    init_cvt=True, init_cvt_tol=1e-6)
    traces = run_controller_comparison(
        base, [("lloyd", 0), ("tvd_c", 0), ("tvd_dk", 1)])

    lloyd_peak = traces["lloyd"].peak_tracking_error()
    print(f"{'controller':<10} {'peak |p - c|':>14} {'vs lloyd':>10} {'total cost':>12}")
    for label, tr in traces.items():
        peak = tr.peak_tracking_error()
        print(f"{label:<10} {peak:14.3e} {peak / lloyd_peak:10.1%} {tr.total_cost:12.3f}")

    if args.out_dir:
        out = pathlib.Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for label, tr in traces.items():
            tr.write_csv(out / f"{args.density}_{label}.csv")
        print(f"traces written to {out}/")


if __name__ == "__main__":
    main()
