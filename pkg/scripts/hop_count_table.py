#!/usr/bin/env python3
"""Sweep the Neumann hop count and the four velocity laws from shared starts,
print the total-cost comparison tables for two builtin densities.

Usage: python scripts/hop_count_table.py [--density phi1] [--t-final 25] [--dt 0.02]
"""

import argparse

from coverage_control.sim import Scenario, run_controller_comparison


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--density", action="append",
                    help="builtin density name (repeatable; default phi1 and phi2)")
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--max-hops", type=int, default=10)
    ap.add_argument("--t-final", type=float, default=25.0)
    ap.add_argument("--dt", type=float, default=0.02)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    densities = args.density or ["phi1", "phi2"]
    specs = ([("tvd_dk", k) for k in range(args.max_hops + 1)]
             + [("tvd_c", 0), ("cortes", 0), ("lloyd", 0)])

    totals = {}
    for dens in densities:
        base = Scenario(density=dens, n=args.n, dt=args.dt, t_final=args.t_final,
                        seed=args.seed, init_cvt=True)
        traces = run_controller_comparison(base, specs)
        totals[dens] = {label: tr.total_cost for label, tr in traces.items()}

    labels = [f"tvd_d{k}" for k in range(args.max_hops + 1)] + ["tvd_c", "cortes", "lloyd"]
    width = max(len(l) for l in labels) + 2
    header = "algorithm".ljust(width) + "".join(f"{d:>12}" for d in densities)
    print(header)
    print("-" * len(header))
    for label in labels:
        row = label.ljust(width)
        for dens in densities:
            row += f"{totals[dens][label]:12.2f}"
        print(row)


if __name__ == "__main__":
    main()
