"""Bound reports: lower and upper bounds on one scenario plus optimality-gap estimates."""
from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field

from .baselines import RRTParams, baseline_lower_bound, rrt_plan, sipp_plan, validate_trajectory
from .discretization import build_graph
from .reachability import compute_reachable_intervals
from .scenario import Scenario
from .search import SearchOptions, solve

SANDWICH_TOL = 1e-9


class InvariantViolation(RuntimeError):
    """A lower bound exceeded a validated upper bound."""


def gap(upper: float, lower: float):
    """Optimality-gap estimate ``(C - C') / C'``; ``None`` unless ``C >= C' > 0``."""
    if not (math.isfinite(upper) and math.isfinite(lower)):
        return None
    if lower <= 0 or upper < lower:
        return None
    return (upper - lower) / lower


@dataclass
class LowerBound:
    method: str  # "lb_astar" or "baseline"
    cost: float
    n: int | None = None
    k: int | None = None
    dt: float | None = None
    expansion_constraint: bool | None = None
    status: str = "solved"
    expansions: int = 0
    wall_ms: float = 0.0

    @property
    def label(self) -> str:
        if self.method != "lb_astar":
            return self.method
        flag = "on" if self.expansion_constraint else "off"
        return f"lb_astar(n={self.n},k={self.k},ec={flag})"


@dataclass
class UpperBound:
    method: str  # "sipp" or "rrt"
    cost: float
    seed: int | None = None
    status: str = "solved"
    wall_ms: float = 0.0

    @property
    def label(self) -> str:
        return self.method if self.seed is None else f"{self.method}(seed={self.seed})"


@dataclass
class BoundReport:
    scenario_id: str
    lower: list = field(default_factory=list)
    upper: list = field(default_factory=list)
    gaps: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def best_lower(self) -> float:
        costs = [lb.cost for lb in self.lower if math.isfinite(lb.cost)]
        return max(costs) if costs else -math.inf

    def check_sandwich(self) -> None:
        """Raise ``InvariantViolation`` if some lower bound beats a validated upper bound."""
        for lb in self.lower:
            if not math.isfinite(lb.cost):
                continue
            for ub in self.upper:
                if math.isfinite(ub.cost) and lb.cost > ub.cost + SANDWICH_TOL:
                    raise InvariantViolation(
                        f"{lb.label} = {lb.cost!r} exceeds {ub.label} = {ub.cost!r} on {self.scenario_id}")

    def compute_gaps(self) -> None:
        self.gaps = []
        for ub in self.upper:
            for lb in self.lower:
                value = gap(ub.cost, lb.cost)
                if value is not None:
                    self.gaps.append({"upper": ub.label, "lower": lb.label, "gap": value})

    def headline(self):
        """``(gap(sipp, best lb_astar), gap(sipp, baseline))``, either may be ``None``."""
        sipp = next((u for u in self.upper if u.method == "sipp" and math.isfinite(u.cost)), None)
        lbs = [lb.cost for lb in self.lower if lb.method == "lb_astar" and math.isfinite(lb.cost)]
        base = next((lb.cost for lb in self.lower if lb.method == "baseline"), math.inf)
        if sipp is None:
            return None, None
        return (gap(sipp.cost, max(lbs)) if lbs else None), gap(sipp.cost, base)

    def to_dict(self) -> dict:
        g_lb, g_base = self.headline()
        return {
            "scenario": self.scenario_id,
            "lower": [asdict(lb) | {"label": lb.label} for lb in self.lower],
            "upper": [asdict(ub) | {"label": ub.label} for ub in self.upper],
            "best_lower": self.best_lower(),
            "gaps": self.gaps,
            "headline": {"gap_sipp_lb_astar": g_lb, "gap_sipp_baseline": g_base},
            "errors": self.errors,
        }

    def to_json(self) -> str:
        return json.dumps(_finite(self.to_dict()), indent=2)

    def to_text(self) -> str:
        lines = [f"scenario {self.scenario_id}"]
        for lb in self.lower:
            lines.append(f"  lower {lb.label:<32} {lb.cost:10.4f}  [{lb.status}]")
        for ub in self.upper:
            lines.append(f"  upper {ub.label:<32} {ub.cost:10.4f}  [{ub.status}]")
        for row in self.gaps:
            lines.append(f"  gap   {row['upper']} vs {row['lower']}: {100 * row['gap']:.2f}%")
        g_lb, g_base = self.headline()
        if g_lb is not None and g_base is not None:
            verdict = "tighter" if g_lb < g_base else "not tighter"
            lines.append(f"  headline: gap(sipp, lb_astar) {100 * g_lb:.2f}% vs "
                         f"gap(sipp, baseline) {100 * g_base:.2f}% -> {verdict}")
        for err in self.errors:
            lines.append(f"  error {err}")
        return "\n".join(lines)


def _finite(obj):
    # json has no inf; emit null instead
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def run_lower_bound(scenario: Scenario, n: int, k: int, dt=None, expansion_constraint=True,
                    robust=False) -> LowerBound:
    t0 = time.perf_counter()
    g = build_graph(scenario, n, k)
    table = compute_reachable_intervals(g, scenario, dt, robust=robust)
    res = solve(g, table, SearchOptions(expansion_constraint=expansion_constraint))
    return LowerBound("lb_astar", res.cost, n, k, table.dt, expansion_constraint, res.status,
                      res.stats["expansions"], 1000 * (time.perf_counter() - t0))


def build_report(scenario: Scenario, configs=((20, 25),), dt=None, constraint_flags=(True,),
                 rrt_seeds=(0,), grid_n=40, rrt_params: RRTParams | None = None,
                 check: bool = True) -> BoundReport:
    """Run the baseline, LB-A* per config, SIPP and RRT; then gaps and the sandwich check.

    Sub-planner failures are recorded in ``errors`` and never stop the report.
    """
    rep = BoundReport(scenario.name or "scenario")
    t0 = time.perf_counter()
    try:
        base, _ = baseline_lower_bound(scenario)
        rep.lower.append(LowerBound("baseline", base, status="solved" if math.isfinite(base) else "no_path",
                                    wall_ms=1000 * (time.perf_counter() - t0)))
    except Exception as exc:  # noqa: BLE001
        rep.errors.append(f"baseline: {exc}")
    for n, k in configs:
        for flag in constraint_flags:
            try:
                rep.lower.append(run_lower_bound(scenario, n, k, dt, flag))
            except Exception as exc:  # noqa: BLE001
                rep.errors.append(f"lb_astar(n={n},k={k}): {exc}")

    t0 = time.perf_counter()
    try:
        traj = sipp_plan(scenario, grid_n)
        ok = traj is not None and validate_trajectory(scenario, traj)
        rep.upper.append(UpperBound("sipp", traj.total_cost if ok else math.inf,
                                    status="solved" if ok else "no_path",
                                    wall_ms=1000 * (time.perf_counter() - t0)))
    except Exception as exc:  # noqa: BLE001
        rep.errors.append(f"sipp: {exc}")
    for seed in rrt_seeds:
        t0 = time.perf_counter()
        try:
            traj = rrt_plan(scenario, seed, rrt_params)
            ok = traj is not None and validate_trajectory(scenario, traj)
            rep.upper.append(UpperBound("rrt", traj.total_cost if ok else math.inf, seed,
                                        "solved" if ok else "no_path", 1000 * (time.perf_counter() - t0)))
        except Exception as exc:  # noqa: BLE001
            rep.errors.append(f"rrt(seed={seed}): {exc}")

    if check:
        rep.check_sandwich()
    rep.compute_gaps()
    return rep
