"""``mpdo-bounds`` command line: generate scenes, compute bounds, sweep (n, k), report gaps."""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import presets
from .baselines import RRTParams, baseline_lower_bound, rrt_plan, sipp_plan
from .discretization import GraphSizeError, build_graph
from .reachability import compute_reachable_intervals
from .report import InvariantViolation, build_report, run_lower_bound
from .scenario import ScenarioError, dump_scenario, load_scenario_file
from .search import SearchOptions, solve

EXIT_OK = 0
EXIT_NO_PATH = 2
EXIT_INPUT = 3
EXIT_INVARIANT = 4

log = logging.getLogger("mpdo_bounds")


class InputError(Exception):
    pass


def _load(arg: str):
    """Scenario from a JSON file, or from ``preset:NAME[:SEED]``."""
    if arg.startswith("preset:"):
        parts = arg.split(":")
        seed = int(parts[2]) if len(parts) > 2 else 0
        try:
            return presets.make_preset(parts[1], seed)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    try:
        return load_scenario_file(arg)
    except OSError as exc:
        raise InputError(f"cannot read {arg}: {exc.strerror or exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return value == "on"


def _positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _positive_float(value: str) -> float:
    x = float(value)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return x


def _path_csv(g, result) -> str:
    rows = ["vertex,arrival,wait,x0,y0,x1,y1"]
    for step in result.path:
        (x0, y0), (x1, y1) = g.vertex(step.vertex).sub_segment.endpoints
        coords = ",".join(repr(float(c)) for c in (x0, y0, x1, y1))
        rows.append(f"{step.vertex},{step.arrival!r},{step.wait!r},{coords}")
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------- commands

def cmd_generate(args) -> int:
    try:
        sc = presets.make_preset(args.preset, args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(dump_scenario(sc), args.out)
    return EXIT_OK


def cmd_lowerbound(args) -> int:
    sc = _load(args.scenario)
    g = build_graph(sc, args.n, args.k)
    table = compute_reachable_intervals(g, sc, args.dt, robust=args.robust)
    res = solve(g, table, SearchOptions(expansion_constraint=args.expansion_constraint))
    summary = {"status": res.status, "cost": res.cost if res.solved else None, "n": args.n, "k": args.k,
               "dt": table.dt, "expansion_constraint": args.expansion_constraint,
               "expansions": res.stats["expansions"], "wall_ms": 1000 * res.stats["wall_time"]}
    if args.format == "json":
        print(json.dumps(summary))
    else:
        print(f"status={res.status} cost={res.cost:.6f} expansions={summary['expansions']} "
              f"wall_ms={summary['wall_ms']:.1f}")
    if args.out and res.solved:
        Path(args.out).write_text(_path_csv(g, res))
    return EXIT_OK if res.solved else EXIT_NO_PATH


def _parse_pairs(text: str):
    pairs = []
    for item in text.split(","):
        n, _, k = item.strip().partition("x")
        pairs.append((int(n), int(k)))
    if any(n < 1 or k < 1 for n, k in pairs):
        raise InputError("n and k must be >= 1")
    return pairs


def sweep(sc, pairs, dt=None, expansion_constraint=True, jobs=1):
    """Rows ``(n, k, cost, expansions, wall_ms)`` sorted by ``(n, k)``, duplicates dropped."""
    cells = sorted(set(pairs))

    def one(nk):
        n, k = nk
        try:
            lb = run_lower_bound(sc, n, k, dt, expansion_constraint)
            return n, k, lb.cost, lb.expansions, lb.wall_ms
        except (GraphSizeError, ValueError) as exc:
            log.warning("sweep cell n=%d k=%d failed: %s", n, k, exc)
            return n, k, math.inf, 0, 0.0

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(one, cells))
    return [one(nk) for nk in cells]


def cmd_sweep(args) -> int:
    sc = _load(args.scenario)
    if args.pairs:
        pairs = _parse_pairs(args.pairs)
    else:
        if not args.n or not args.k:
            raise InputError("sweep needs --n and --k lists or --pairs")
        pairs = [(n, k) for n in args.n for k in args.k]
    rows = sweep(sc, pairs, args.dt, args.expansion_constraint, args.jobs)
    if args.format == "json":
        text = json.dumps([{"n": n, "k": k, "cost": c if math.isfinite(c) else None, "expansions": e,
                            "wall_ms": w} for n, k, c, e, w in rows], indent=2)
    else:
        lines = ["n,k,cost,expansions,wall_ms"]
        lines += [f"{n},{k},{c if math.isfinite(c) else 'no_path'},{e},{w:.1f}" for n, k, c, e, w in rows]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK if all(math.isfinite(r[2]) for r in rows) else EXIT_NO_PATH


def cmd_baseline(args) -> int:
    sc = _load(args.scenario)
    cost, path = baseline_lower_bound(sc)
    if args.format == "json":
        print(json.dumps({"cost": cost if math.isfinite(cost) else None, "path": [list(p) for p in path]}))
    else:
        print(f"baseline cost={cost:.6f}")
    return EXIT_OK if math.isfinite(cost) else EXIT_NO_PATH


def _trajectory_result(name, traj, args) -> int:
    if traj is None:
        print(f"{name} status=no_path")
        return EXIT_NO_PATH
    print(f"{name} status=solved cost={traj.total_cost:.6f}")
    if args.out:
        Path(args.out).write_text(traj.to_csv())
    return EXIT_OK


def cmd_sipp(args) -> int:
    sc = _load(args.scenario)
    return _trajectory_result("sipp", sipp_plan(sc, args.grid_n, args.dt), args)


def cmd_rrt(args) -> int:
    sc = _load(args.scenario)
    params = RRTParams(max_iters=args.iters)
    return _trajectory_result("rrt", rrt_plan(sc, args.seed, params), args)


def cmd_report(args) -> int:
    sc = _load(args.scenario)
    flags = (True, False) if args.both_constraints else (args.expansion_constraint,)
    seeds = tuple(range(args.seed, args.seed + args.rrt_runs))
    rep = build_report(sc, [(args.n, args.k)], args.dt, flags, seeds, args.grid_n)
    _emit(rep.to_json() if args.format == "json" else rep.to_text(), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mpdo-bounds",
                                description="Lower and upper bounds for point-robot planning among moving obstacles.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_arg(sp):
        sp.add_argument("--scenario", required=True, help="scenario JSON file or preset:NAME[:SEED]")

    def fmt_arg(sp):
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("generate", help="write a preset scenario")
    sp.add_argument("--preset", choices=presets.PRESETS, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("lowerbound", help="LB-A* lower bound for one (n, k)")
    scenario_arg(sp)
    sp.add_argument("--n", type=_positive_int, required=True)
    sp.add_argument("--k", type=_positive_int, required=True)
    sp.add_argument("--dt", type=_positive_float)
    sp.add_argument("--expansion-constraint", type=_on_off, default=True, metavar="on|off")
    sp.add_argument("--robust", action="store_true", help="shrink obstacles by speed*dt/2 when sampling")
    sp.add_argument("--out", help="write the lower-bound path as CSV")
    fmt_arg(sp)
    sp.set_defaults(func=cmd_lowerbound)

    sp = sub.add_parser("sweep", help="LB-A* over a grid of (n, k)")
    scenario_arg(sp)
    sp.add_argument("--n", type=_positive_int, nargs="+")
    sp.add_argument("--k", type=_positive_int, nargs="+")
    sp.add_argument("--pairs", help="explicit list such as 5x5,10x10,20x25")
    sp.add_argument("--dt", type=_positive_float)
    sp.add_argument("--expansion-constraint", type=_on_off, default=True, metavar="on|off")
    sp.add_argument("--jobs", type=_positive_int, default=1)
    sp.add_argument("--out")
    fmt_arg(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("baseline", help="static-obstacle visibility-graph lower bound")
    scenario_arg(sp)
    fmt_arg(sp)
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("sipp", help="SIPP upper bound on a grid")
    scenario_arg(sp)
    sp.add_argument("--grid-n", type=_positive_int, default=40)
    sp.add_argument("--dt", type=_positive_float)
    sp.add_argument("--out", help="write the trajectory as CSV")
    sp.set_defaults(func=cmd_sipp)

    sp = sub.add_parser("rrt", help="space-time RRT upper bound")
    scenario_arg(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--iters", type=_positive_int, default=5000)
    sp.add_argument("--out", help="write the trajectory as CSV")
    sp.set_defaults(func=cmd_rrt)

    sp = sub.add_parser("report", help="all bounds plus optimality-gap estimates")
    scenario_arg(sp)
    sp.add_argument("--n", type=_positive_int, default=20)
    sp.add_argument("--k", type=_positive_int, default=25)
    sp.add_argument("--dt", type=_positive_float)
    sp.add_argument("--expansion-constraint", type=_on_off, default=True, metavar="on|off")
    sp.add_argument("--both-constraints", action="store_true", help="report LB-A* with the constraint on and off")
    sp.add_argument("--grid-n", type=_positive_int, default=40)
    sp.add_argument("--seed", type=int, default=0, help="first RRT seed")
    sp.add_argument("--rrt-runs", type=_positive_int, default=1)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InputError, ScenarioError, GraphSizeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
