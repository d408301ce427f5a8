"""Command-line front end: run scenarios, compare controllers, serve the console.

Exit codes: 0 success, 2 scenario/schema error (message names the offending
key, with line/column for JSON syntax errors), 3 simulation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .errors import CoverageControlError, ScenarioError
from .sim import Scenario, parse_controller_spec, run, run_controller_comparison

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_SIM = 3


def load_scenario(path: str) -> Scenario:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}", key=None) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"scenario JSON syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            key=None) from exc
    return Scenario.from_dict(data)


def apply_overrides(scenario: Scenario, args) -> Scenario:
    """Command-line flags take precedence over scenario-file values."""
    updates = {}
    if getattr(args, "controller", None) is not None:
        name, hops = parse_controller_spec(args.controller)
        updates["controller"] = name
        updates["hops"] = hops
    if getattr(args, "hops", None) is not None:
        updates["hops"] = args.hops
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "duration", None) is not None:
        updates["t_final"] = args.duration
    if getattr(args, "dt", None) is not None:
        updates["dt"] = args.dt
    return replace(scenario, **updates) if updates else scenario


def _summary_path(out_path: str) -> str:
    return (out_path[:-4] if out_path.endswith(".csv") else out_path) + ".summary.json"


def cmd_run(args) -> int:
    try:
        scenario = apply_overrides(load_scenario(args.scenario), args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        trace = run(scenario)
    except CoverageControlError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_SIM
    trace.write_csv(args.out)
    summary = trace.summary()
    with open(_summary_path(args.out), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for k in ("controller", "total_cost", "peak_tracking_error",
              "lambda_max_peak", "condition_flag_count", "clamp_event_count"):
        print(f"{k}: {summary[k]}")
    return EXIT_OK


def cmd_compare(args) -> int:
    specs_text = [s for s in (args.controllers or "").split(",") if s.strip()]
    if not specs_text:
        print("no controllers given (use --controllers lloyd,cortes,tvd_c,tvd_d1,...)",
              file=sys.stderr)
        return EXIT_SCHEMA
    try:
        scenario = apply_overrides(load_scenario(args.scenario), args)
        specs = [parse_controller_spec(s) for s in specs_text]
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        traces = run_controller_comparison(scenario, specs)
    except CoverageControlError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_SIM

    rows = []
    for label, trace in traces.items():
        clamps = len(trace.clamp_events)
        note = "N/A-equivalent" if clamps > args.clamp_threshold else ""
        rows.append((label, trace.total_cost, trace.peak_tracking_error(), clamps, note))

    header = ("controller", "total_cost", "peak_tracking_error", "clamp_events", "note")
    widths = [max(len(header[c]), *(len(_cell(r[c])) for r in rows)) for c in range(5)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    for r in rows:
        lines.append("  ".join(_cell(v).ljust(w) for v, w in zip(r, widths)))
    table = "\n".join(lines)
    print(table)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for r in rows:
                fh.write(",".join(_cell(v) for v in r) + "\n")
    return EXIT_OK


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def cmd_serve(args) -> int:
    import asyncio

    from .service import serve_forever

    try:
        scenario = apply_overrides(load_scenario(args.scenario), args)
        host, _, port = args.listen.rpartition(":")
        if not host or not port.isdigit():
            raise ScenarioError(f"--listen expects HOST:PORT (got {args.listen!r})",
                                key="listen")
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        asyncio.run(serve_forever(scenario, host=host, port=int(port),
                                  time_scale=args.time_scale, frame_hz=args.frame_hz))
    except KeyboardInterrupt:
        pass
    except CoverageControlError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_SIM
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covctl",
        description="Multi-robot coverage control: run, compare, and serve scenarios.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--controller", help="override controller (lloyd|cortes|tvd_c|tvd_d<k>)")
        p.add_argument("--hops", type=int, help="override Neumann hop count")
        p.add_argument("--seed", type=int, help="override RNG seed")
        p.add_argument("--duration", type=float, help="override t_final (seconds)")
        p.add_argument("--dt", type=float, help="override integrator step (seconds)")

    p_run = sub.add_parser("run", help="run one scenario, write trace CSV + summary")
    common(p_run)
    p_run.add_argument("--out", required=True, help="trace CSV output path")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run several controllers from shared starts")
    common(p_cmp)
    p_cmp.add_argument("--controllers", required=True,
                       help="comma list, e.g. lloyd,cortes,tvd_c,tvd_d1")
    p_cmp.add_argument("--out", help="comparison table CSV output path")
    p_cmp.add_argument("--clamp-threshold", type=int, default=0,
                       help="clamp events above this count mark a run N/A-equivalent")
    p_cmp.set_defaults(func=cmd_compare)

    p_srv = sub.add_parser("serve", help="serve the live operator console bridge")
    common(p_srv)
    p_srv.add_argument("--listen", default="127.0.0.1:8765", help="HOST:PORT to listen on")
    p_srv.add_argument("--time-scale", type=float, default=1.0,
                       help="simulation seconds per wall-clock second")
    p_srv.add_argument("--frame-hz", type=float, default=30.0, help="frame broadcast rate")
    p_srv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
