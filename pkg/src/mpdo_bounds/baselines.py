"""Comparison bounds: visibility-graph lower bound, SIPP and RRT upper bounds."""
from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import moving_point_collides, point_in_union, segments_cross_properly
from .reachability import GridIntervals, compute_safe_intervals_grid
from .scenario import Bar, ConvexPolygon, Disc, RobotTrajectory, Scenario

log = logging.getLogger(__name__)

SPEED_TOL = 1e-9
DISC_SIDES = 32


# ---------------------------------------------------------------- validation

def validate_trajectory(scenario: Scenario, traj: RobotTrajectory, dt_check: float = 0.1) -> bool:
    """Endpoints, speed limit and collision freedom of a robot trajectory."""
    samples = traj.samples
    if not samples:
        return False
    t0, x0, y0 = samples[0]
    tn, xn, yn = samples[-1]
    if abs(t0) > 1e-12 or tn > scenario.T + 1e-9:
        return False
    if math.hypot(x0 - scenario.start[0], y0 - scenario.start[1]) > 1e-9:
        return False
    if math.hypot(xn - scenario.goal[0], yn - scenario.goal[1]) > 1e-9:
        return False
    for (ta, xa, ya), (tb, xb, yb) in zip(samples, samples[1:]):
        if tb < ta:
            return False
        dist = math.hypot(xb - xa, yb - ya)
        if dist > scenario.v_max * (tb - ta) + SPEED_TOL:
            return False
    if len(samples) == 1:
        return not point_in_union((x0, y0), scenario, t0)
    for (ta, xa, ya), (tb, xb, yb) in zip(samples, samples[1:]):
        if moving_point_collides((xa, ya), ta, (xb, yb), tb, scenario, dt_check):
            return False
    return True


# ---------------------------------------------------------------- visibility graph

@dataclass
class VisibilityGraph:
    nodes: list
    edges: dict = field(default_factory=dict)  # node index -> list of (node, length)


def _static_blockers(scenario: Scenario):
    """Static obstacles as (kind, geometry) in world coordinates.

    Static discs are replaced by an inscribed regular polygon, which keeps the
    shortest path a lower bound.
    """
    out = []
    for ob in scenario.static_obstacles():
        tx, ty = (float(c) for c in ob.trajectory.translation(0.0))
        s = ob.shape
        if isinstance(s, Bar):
            out.append(("bar", ((s.a[0] + tx, s.a[1] + ty), (s.b[0] + tx, s.b[1] + ty))))
        elif isinstance(s, ConvexPolygon):
            out.append(("poly", [(x + tx, y + ty) for x, y in s.vertices]))
        elif isinstance(s, Disc):
            ang = 2 * math.pi * np.arange(DISC_SIDES) / DISC_SIDES
            out.append(("poly", [(tx + s.radius * math.cos(a), ty + s.radius * math.sin(a)) for a in ang]))
    return out


def _crosses_polygon_interior(p, q, verts) -> bool:
    # parameter range of p->q strictly inside every half-plane
    lo, hi = 0.0, 1.0
    dx, dy = q[0] - p[0], q[1] - p[1]
    n = len(verts)
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        ex, ey = bx - ax, by - ay
        c0 = ex * (p[1] - ay) - ey * (p[0] - ax)
        c1 = ex * dy - ey * dx
        if abs(c1) < 1e-15:
            if c0 <= 1e-12:
                return False
            continue
        root = -c0 / c1
        if c1 > 0:
            lo = max(lo, root)
        else:
            hi = min(hi, root)
    return hi - lo > 1e-9


def _visible(p, q, blockers) -> bool:
    for kind, geom in blockers:
        if kind == "bar":
            if segments_cross_properly(p, q, geom[0], geom[1]):
                return False
        elif _crosses_polygon_interior(p, q, geom):
            return False
    return True


def build_visibility_graph(scenario: Scenario) -> VisibilityGraph:
    blockers = _static_blockers(scenario)
    nodes = [tuple(scenario.start), tuple(scenario.goal)]
    L = scenario.L
    for kind, geom in blockers:
        pts = geom if kind == "poly" else list(geom)
        nodes.extend(p for p in pts if -1e-12 <= p[0] <= L + 1e-12 and -1e-12 <= p[1] <= L + 1e-12)
    vg = VisibilityGraph(nodes, {i: [] for i in range(len(nodes))})
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            if _visible(nodes[i], nodes[j], blockers):
                d = math.dist(nodes[i], nodes[j])
                vg.edges[i].append((j, d))
                vg.edges[j].append((i, d))
    return vg


def baseline_lower_bound(scenario: Scenario):
    """Shortest static-obstacle path length over ``v_max``; ``(inf, [])`` if disconnected."""
    vg = build_visibility_graph(scenario)
    dist = {0: 0.0}
    parent = {0: None}
    heap = [(0.0, 0)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if u == 1:
            break
        for v, w in vg.edges[u]:
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    if 1 not in dist:
        return math.inf, []
    path = [1]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return dist[1] / scenario.v_max, [vg.nodes[i] for i in reversed(path)]


# ---------------------------------------------------------------- SIPP

_MOVES = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]


def default_grid_dt(scenario: Scenario, grid_n: int) -> float:
    v_obs = scenario.max_obstacle_speed()
    if v_obs <= 0:
        return scenario.T / 10
    return min(max(0.05 * (scenario.L / grid_n) / v_obs, scenario.T / 1e4), scenario.T / 10)


def _interval_index(ivs, t):
    for i, (a, b) in enumerate(ivs):
        if a <= t <= b:
            return i
    return None


def sipp_plan(scenario: Scenario, grid_n: int = 40, dt: float | None = None,
              grid: GridIntervals | None = None, dt_check: float = 0.05):
    """Safe-interval A* on the 8-connected grid of cell centres.

    Returns a validated ``RobotTrajectory`` or ``None``.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    if grid is None:
        grid = compute_safe_intervals_grid(grid_n, scenario, dt or default_grid_dt(scenario, grid_n))
    vmax = scenario.v_max
    size = grid.cell_size
    horizon = scenario.T
    start_cell = grid.cell_of(scenario.start)
    goal_cell = grid.cell_of(scenario.goal)
    goal = scenario.goal

    def h(cell):
        c = grid.center(cell)
        return math.dist(c, goal) / vmax

    c0 = grid.center(start_cell)
    t_first = math.dist(scenario.start, c0) / vmax
    i0 = _interval_index(grid.intervals[start_cell], 0.0)
    if i0 is None or grid.intervals[start_cell][i0][1] < t_first:
        return None

    best = {(start_cell, i0): t_first}
    parent = {(start_cell, i0): None}
    depart = {}
    heap = [(t_first + h(start_cell), t_first, start_cell, i0)]
    final = None
    while heap:
        f, g, cell, iv = heapq.heappop(heap)
        if g > best.get((cell, iv), math.inf):
            continue
        a_c, b_c = grid.intervals[cell][iv]
        if cell == goal_cell:
            leg = math.dist(grid.center(cell), goal) / vmax
            if g + leg <= min(b_c, horizon):
                final = (cell, iv, g, leg)
                break
        row, col = divmod(cell, grid_n)
        for dr, dc in _MOVES:
            r2, c2 = row + dr, col + dc
            if not (0 <= r2 < grid_n and 0 <= c2 < grid_n):
                continue
            nxt = r2 * grid_n + c2
            tau = size * (math.sqrt(2) if dr and dc else 1.0) / vmax
            for j, (a_m, b_m) in enumerate(grid.intervals[nxt]):
                t_dep = max(g, a_m)
                t_arr = t_dep + tau
                if t_arr > min(b_c, b_m, horizon):
                    if a_m > b_c:
                        break
                    continue
                key = (nxt, j)
                if t_arr < best.get(key, math.inf):
                    best[key] = t_arr
                    parent[key] = (cell, iv)
                    depart[key] = t_dep
                    heapq.heappush(heap, (t_arr + h(nxt), t_arr, nxt, j))
    if final is None:
        return None

    cell, iv, g, leg = final
    chain = []
    key = (cell, iv)
    while key is not None:
        chain.append(key)
        key = parent[key]
    chain.reverse()
    samples = [(0.0, scenario.start[0], scenario.start[1])]
    samples.append((best[chain[0]], *c0))
    for prev, key in zip(chain, chain[1:]):
        t_dep = depart[key]
        pc = grid.center(prev[0])
        if t_dep > samples[-1][0]:
            samples.append((t_dep, *pc))
        samples.append((best[key], *grid.center(key[0])))
    samples.append((g + leg, goal[0], goal[1]))
    traj = RobotTrajectory(_dedupe(samples))
    if not validate_trajectory(scenario, traj, dt_check):
        log.warning("SIPP plan failed validation; discarding")
        return None
    return traj


def _dedupe(samples):
    out = [samples[0]]
    for s in samples[1:]:
        if s != out[-1]:
            out.append(s)
    return out


# ---------------------------------------------------------------- RRT

@dataclass
class RRTParams:
    step: float = 0.05
    max_iters: int = 5000
    goal_bias: float = 0.1
    wait_prob: float = 0.1
    dt_check: float = 0.05


def rrt_plan(scenario: Scenario, seed: int = 0, params: RRTParams | None = None):
    """Basic space-time RRT rooted at ``(start, 0)``.

    Motions run at exactly ``v_max``; with probability ``wait_prob`` a node is
    extended by a pure wait of ``step / v_max`` instead.
    """
    p = params or RRTParams()
    if p.step <= 0 or p.max_iters <= 0 or not 0 <= p.goal_bias <= 1:
        raise ValueError("invalid RRT parameters")
    rng = np.random.default_rng(seed)
    vmax = scenario.v_max
    L, T = scenario.L, scenario.T
    goal = np.asarray(scenario.goal)
    xs = [scenario.start[0]]
    ys = [scenario.start[1]]
    ts = [0.0]
    parent = [-1]
    pts = np.empty((p.max_iters + 1, 2))
    pts[0] = scenario.start
    hold = p.step / vmax

    def finish(idx, t_goal):
        chain = [idx]
        while parent[chain[-1]] >= 0:
            chain.append(parent[chain[-1]])
        chain.reverse()
        samples = [(ts[i], xs[i], ys[i]) for i in chain]
        samples.append((t_goal, float(goal[0]), float(goal[1])))
        return RobotTrajectory(_dedupe(samples))

    def try_goal(idx):
        here = (xs[idx], ys[idx])
        dist = math.dist(here, goal)
        if dist > p.step:
            return None
        t_goal = ts[idx] + dist / vmax
        if t_goal > T or moving_point_collides(here, ts[idx], goal, t_goal, scenario, p.dt_check):
            return None
        return finish(idx, t_goal)

    hit = try_goal(0)
    if hit is not None:
        return hit
    for _ in range(p.max_iters):
        n = len(xs)
        if rng.random() < p.goal_bias:
            target = goal
        else:
            target = rng.uniform(0.0, L, size=2)
        diff = pts[:n] - target
        d2 = np.einsum("ij,ij->i", diff, diff)
        near = n - 1 - int(np.argmin(d2[::-1]))  # ties go to the newest node
        here = pts[near]
        if rng.random() < p.wait_prob:
            new = here.copy()
            t_new = ts[near] + hold
        else:
            vec = target - here
            dist = float(np.hypot(*vec))
            if dist < 1e-12:
                continue
            stepped = min(p.step, dist)
            new = here + vec / dist * stepped
            t_new = ts[near] + stepped / vmax
        if t_new > T:
            continue
        if moving_point_collides(tuple(here), ts[near], tuple(new), t_new, scenario, p.dt_check):
            continue
        xs.append(float(new[0]))
        ys.append(float(new[1]))
        ts.append(t_new)
        parent.append(near)
        pts[n] = new
        hit = try_goal(n)
        if hit is not None:
            if validate_trajectory(scenario, hit, p.dt_check):
                return hit
    return None
