"""Reachable time intervals of graph vertices and safe intervals of grid cells."""
from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from .discretization import LbpGraph
from .geometry import (AxisSegment, cover_bounds_batch, point_in_union, points_in_union_batch,
                       shape_cover_interval, union_covers_batch)
from .scenario import Scenario


@dataclass
class IntervalTable:
    """Sorted disjoint reachable intervals, stored once per line segment.

    Index ``n_line_segments`` holds the start point, the next one the goal.
    """

    horizon: float
    k: int
    n_line_segments: int
    intervals: list
    dt: float | None = None
    _starts: list = field(default=None, repr=False)
    _ends: list = field(default=None, repr=False)

    def __post_init__(self):
        self.intervals = [[(float(a), float(b)) for a, b in ivs] for ivs in self.intervals]
        self._starts = [[a for a, _ in ivs] for ivs in self.intervals]
        self._ends = [[b for _, b in ivs] for ivs in self.intervals]
        if len(self.intervals) != self.n_line_segments + 2:
            raise ValueError("need one interval list per line segment plus start and goal")

    @classmethod
    def for_graph(cls, g: LbpGraph, intervals, horizon: float, dt=None) -> "IntervalTable":
        return cls(horizon, g.k, g.n_line_segments, list(intervals), dt)

    def segment_of(self, v: int) -> int:
        n_sub = self.n_line_segments * self.k
        if v < n_sub:
            return v // self.k
        return self.n_line_segments + (v - n_sub)

    def of_vertex(self, v: int):
        return self.intervals[self.segment_of(v)]

    def of_segment(self, ls: int):
        return self.intervals[ls]

    def always_open(self) -> np.ndarray:
        """Mask of segments reachable throughout ``[0, horizon]``."""
        return np.array([len(ivs) == 1 and ivs[0][0] <= 0.0 and ivs[0][1] >= self.horizon
                         for ivs in self.intervals])

    def first_reaching(self, ls: int, t_ready: float):
        ends = self._ends[ls]
        j = bisect_left(ends, t_ready)
        if j == len(ends):
            return None
        arrival = max(self._starts[ls][j], t_ready)
        if arrival > self.horizon:
            return None
        return j, arrival

    def to_csv(self) -> str:
        rows = ["line_segment_id,t_start,t_end"]
        for ls, ivs in enumerate(self.intervals):
            rows += [f"{ls},{a!r},{b!r}" for a, b in ivs]
        return "\n".join(rows) + "\n"


def first_interval_reaching(table: IntervalTable, v: int, t_ready: float):
    """First interval of ``v`` ending at or after ``t_ready``.

    Returns ``(index, arrival)`` with ``arrival = max(start, t_ready)`` or
    ``None`` when no interval admits an arrival within the horizon.
    """
    if t_ready < 0:
        raise ValueError("t_ready must be >= 0")
    return table.first_reaching(table.segment_of(v), t_ready)


# ---------------------------------------------------------------- sampling

def sample_times(horizon: float, dt: float) -> np.ndarray:
    if dt <= 0:
        raise ValueError("dt must be > 0")
    m = int(math.floor(horizon / dt + 1e-9))
    times = np.arange(m + 1) * dt
    if times[-1] < horizon - 1e-12 * max(1.0, horizon):
        times = np.append(times, horizon)
    else:
        times[-1] = min(times[-1], horizon)
    return times


def default_dt(scenario: Scenario, w: float) -> float:
    """``0.05 w / v_obs`` with at most 10^4 samples; static scenes need two."""
    v_obs = scenario.max_obstacle_speed()
    if v_obs <= 0:
        return scenario.T
    return min(max(0.05 * w / v_obs, scenario.T / 1e4), scenario.T)


def covered_runs_to_reachable(times: np.ndarray, covered: np.ndarray):
    """Reachable intervals from a covered/not-covered sample sequence.

    Each maximal run of two or more covered samples ``t_i..t_j`` becomes the
    open non-reachable interval ``(t_i, t_j)``; isolated covered samples are
    ignored.
    """
    horizon = float(times[-1])
    blocked = []
    m = len(times)
    i = 0
    while i < m:
        if covered[i]:
            j = i
            while j + 1 < m and covered[j + 1]:
                j += 1
            if j > i:
                blocked.append((float(times[i]), float(times[j])))
            i = j + 1
        else:
            i += 1
    out = []
    cursor = 0.0
    for a, b in blocked:
        out.append((cursor, a))
        cursor = b
    out.append((cursor, horizon))
    return out


def _margins(scenario: Scenario, dt: float, robust: bool):
    if not robust:
        return [0.0] * len(scenario.obstacles)
    return [ob.max_speed() * dt / 2 for ob in scenario.obstacles]


def coverage_matrix(g: LbpGraph, scenario: Scenario, times, robust: bool = False, dt=None) -> np.ndarray:
    """Boolean ``(n_line_segments + 2, len(times))`` coverage samples."""
    nls = g.n_line_segments
    out = np.zeros((nls + 2, len(times)), dtype=bool)
    if not scenario.obstacles:
        return out
    margins = _margins(scenario, dt or 0.0, robust)
    for ti, t in enumerate(times):
        lo = np.empty((nls, len(scenario.obstacles)))
        hi = np.empty_like(lo)
        for j, ob in enumerate(scenario.obstacles):
            lo[:, j], hi[:, j] = cover_bounds_batch(g.ls_origin, g.ls_direction, g.w, ob, float(t), margins[j])
        out[:nls, ti] = union_covers_batch(lo, hi)
        if robust:
            out[nls, ti] = _robust_point(g.start, scenario, float(t), margins)
            out[nls + 1, ti] = _robust_point(g.goal, scenario, float(t), margins)
        else:
            out[nls, ti] = point_in_union(g.start, scenario, float(t))
            out[nls + 1, ti] = point_in_union(g.goal, scenario, float(t))
    return out


def _robust_point(p, scenario, t, margins):
    seg = AxisSegment(p, "h", 0.0)
    return any(shape_cover_interval(seg, ob, t, m) for ob, m in zip(scenario.obstacles, margins))


def compute_reachable_intervals(g: LbpGraph, scenario: Scenario, dt: float | None = None,
                                robust: bool = False) -> IntervalTable:
    """Sample segment coverage every ``dt`` seconds and derive reachable intervals.

    With ``robust=True`` every obstacle is shrunk by ``speed * dt / 2`` before
    the coverage test, so a covered sample certifies coverage for the whole
    surrounding half-step.
    """
    if dt is None:
        dt = default_dt(scenario, g.w)
    times = sample_times(scenario.T, dt)
    cov = coverage_matrix(g, scenario, times, robust=robust, dt=dt)
    intervals = [covered_runs_to_reachable(times, row) for row in cov]
    return IntervalTable.for_graph(g, intervals, scenario.T, dt)


# ---------------------------------------------------------------- SIPP grid

@dataclass
class GridIntervals:
    """Safe intervals per grid cell (row-major ``row * grid_n + col``)."""

    grid_n: int
    cell_size: float
    horizon: float
    intervals: list
    dt: float

    def center(self, cell: int):
        row, col = divmod(cell, self.grid_n)
        return ((col + 0.5) * self.cell_size, (row + 0.5) * self.cell_size)

    def cell_of(self, p) -> int:
        col = min(int(p[0] / self.cell_size), self.grid_n - 1)
        row = min(int(p[1] / self.cell_size), self.grid_n - 1)
        return row * self.grid_n + col


def safe_runs_to_intervals(times: np.ndarray, safe: np.ndarray, dt: float):
    """Safe intervals from sampled safety, trimmed inward by ``dt``.

    Runs touching the first or last sample keep that endpoint.
    """
    out = []
    m = len(times)
    i = 0
    while i < m:
        if not safe[i]:
            i += 1
            continue
        j = i
        while j + 1 < m and safe[j + 1]:
            j += 1
        a = float(times[i]) if i == 0 else float(times[i]) + dt
        b = float(times[j]) if j == m - 1 else float(times[j]) - dt
        if a <= b:
            out.append((a, b))
        i = j + 1
    return out


def compute_safe_intervals_grid(grid_n: int, scenario: Scenario, dt: float,
                                inflation: float | None = None) -> GridIntervals:
    """Safe intervals of every grid-cell centre.

    A sample is unsafe when the centre lies within ``inflation`` of the
    obstacle union (default: half the cell diagonal).
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    size = scenario.L / grid_n
    if inflation is None:
        inflation = size * math.sqrt(2) / 2
    if inflation < 0:
        raise ValueError("inflation must be >= 0")
    idx = np.arange(grid_n * grid_n)
    centers = np.column_stack([(idx % grid_n + 0.5) * size, (idx // grid_n + 0.5) * size])
    times = sample_times(scenario.T, dt)
    safe = np.ones((len(centers), len(times)), dtype=bool)
    if scenario.obstacles:
        for ti, t in enumerate(times):
            safe[:, ti] = ~points_in_union_batch(centers, scenario, float(t), inflation)
    intervals = [safe_runs_to_intervals(times, row, dt) for row in safe]
    return GridIntervals(grid_n, size, scenario.T, intervals, dt)
