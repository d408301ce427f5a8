#!/usr/bin/env python3
"""Start the live console service on the default phi2 scenario.

Usage: python scripts/serve_demo.py [--listen 127.0.0.1:8765] [--density phi2]
Then open frontend/public/index.html (after `npm run build` in frontend/)
with ?ws=ws://127.0.0.1:8765.
"""

import argparse
import asyncio

from coverage_control.service import serve_forever
from coverage_control.sim import Scenario


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--listen", default="127.0.0.1:8765")
    ap.add_argument("--density", default="phi2")
    ap.add_argument("--n", type=int, default=6)
    ap.add_argument("--controller", default="tvd_dk")
    ap.add_argument("--hops", type=int, default=1)
    ap.add_argument("--dt", type=float, default=0.01)
    ap.add_argument("--time-scale", type=float, default=1.0)
    args = ap.parse_args()

    host, _, port = args.listen.rpartition(":")
    scen = Scenario(density=args.density, n=args.n, controller=args.controller,
                    hops=args.hops, dt=args.dt, t_final=1e12, init_cvt=True)
    try:
        asyncio.run(serve_forever(scen, host=host or "127.0.0.1", port=int(port),
                                  time_scale=args.time_scale))
    except KeyboardInterrupt:
        pass


if __name__ == "__main__":
    main()
