"""LB-A*: earliest-arrival best-first search over the lower-bounding graph."""
from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .discretization import LbpGraph
from .reachability import IntervalTable, first_interval_reaching


@dataclass(frozen=True)
class SearchOptions:
    expansion_constraint: bool = True
    heuristic: str = "zero"

    def __post_init__(self):
        if self.heuristic != "zero":
            raise ValueError("only the zero heuristic is admissible here")


@dataclass
class PathStep:
    vertex: int
    arrival: float
    wait: float


@dataclass
class SearchResult:
    status: str  # "solved" or "no_path"
    cost: float
    path: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.status == "solved"


@dataclass
class SearchState:
    g: np.ndarray
    parent: np.ndarray
    parent_cell: np.ndarray


def earliest_reach(v: int, u: int, g_v: float, cost_vu: float, table: IntervalTable):
    """Earliest arrival at ``u`` leaving ``v`` (reached at ``g_v``) over an edge of ``cost_vu``.

    Waiting happens at ``v``; the edge itself is never collision-checked.
    """
    hit = first_interval_reaching(table, u, g_v + cost_vu)
    return None if hit is None else hit[1]


def constrained_neighbors(g: LbpGraph, v: int, parent_cell: int | None, opts: SearchOptions):
    """Neighbours of ``v``, dropping edges through the cell its parent edge crossed."""
    nbrs = g.neighbors(v)
    if not opts.expansion_constraint or parent_cell is None or v == g.s:
        return nbrs
    return [e for e in nbrs if e[2] != parent_cell]


def reconstruct(state: SearchState, g: LbpGraph, goal: int | None = None):
    goal = g.d if goal is None else goal
    if not math.isfinite(state.g[goal]):
        raise ValueError("goal was not reached")
    chain = [goal]
    while chain[-1] != g.s:
        chain.append(int(state.parent[chain[-1]]))
    chain.reverse()
    path = []
    for a, b in zip(chain, chain[1:]):
        cost = _edge_cost_via(g, a, b, int(state.parent_cell[b]))
        wait = float(state.g[b]) - float(state.g[a]) - cost
        path.append(PathStep(a, float(state.g[a]), max(wait, 0.0)))
    path.append(PathStep(goal, float(state.g[goal]), 0.0))
    return path


def _edge_cost_via(g: LbpGraph, a: int, b: int, cell: int) -> float:
    ids, costs, cells = g.neighbor_arrays(a)
    hit = np.nonzero((ids == b) & (cells == cell))[0]
    if len(hit) == 0:
        hit = np.nonzero(ids == b)[0]
    return float(costs[hit[0]])


def solve(g: LbpGraph, table: IntervalTable, opts: SearchOptions | None = None) -> SearchResult:
    """Minimum arrival time at the goal subject to the reachable intervals.

    OPEN is ordered by ``(f, -g, vertex)``; stale heap entries are skipped when
    popped. With ``expansion_constraint`` the neighbours of a vertex exclude
    edges through the cell traversed by the edge that set its label.
    """
    opts = opts or SearchOptions()
    t0 = time.perf_counter()
    nv = g.n_vertices
    gval = np.full(nv, np.inf)
    parent = np.full(nv, -1, dtype=np.int64)
    parent_cell = np.full(nv, -1, dtype=np.int64)
    state = SearchState(gval, parent, parent_cell)
    stats = {"expansions": 0, "generated": 0}

    def finish(status, cost, path):
        stats["wall_time"] = time.perf_counter() - t0
        return SearchResult(status, cost, path, stats)

    start_hit = first_interval_reaching(table, g.s, 0.0)
    if start_hit is None or start_hit[1] != 0.0:
        return finish("no_path", math.inf, [])

    open_seg = table.always_open()
    horizon = table.horizon
    gval[g.s] = 0.0
    heap = [(0.0, -0.0, g.s)]
    k = g.k
    n_sub = g.n_sub
    nls = g.n_line_segments

    while heap:
        f, neg_g, v = heapq.heappop(heap)
        if -neg_g > gval[v]:
            continue
        if v == g.d:
            return finish("solved", float(gval[v]), reconstruct(state, g))
        stats["expansions"] += 1
        gv = float(gval[v])

        ids, costs, cells = g.neighbor_arrays(v)
        if opts.expansion_constraint and v != g.s and parent_cell[v] >= 0:
            keep = cells != parent_cell[v]
            ids, costs, cells = ids[keep], costs[keep], cells[keep]
        if len(ids) == 0:
            continue
        ready = gv + costs
        segs = np.where(ids < n_sub, ids // k, nls + (ids - n_sub))
        free = open_seg[segs]
        arrival = np.where(free & (ready <= horizon), ready, np.inf)
        for j in np.nonzero(~free)[0]:
            hit = table.first_reaching(int(segs[j]), float(ready[j]))
            if hit is not None:
                arrival[j] = hit[1]
        better = arrival < gval[ids]
        if not better.any():
            continue
        ids, arrival, cells = ids[better], arrival[better], cells[better]
        gval[ids] = arrival
        parent[ids] = v
        parent_cell[ids] = cells
        stats["generated"] += len(ids)
        for u, a in zip(ids.tolist(), arrival.tolist()):
            heapq.heappush(heap, (a, -a, u))

    return finish("no_path", math.inf, [])
