"""Bi-level grid discretisation: cells, boundary line segments and sub-segment vertices.

Layout
------
Cells are indexed row-major, ``cell = row * n + col``. Horizontal line segments
come first (``row * n + col`` for the segment at ``y = row * w`` spanning column
``col``), then vertical ones (``n(n+1) + row * (n+1) + col`` for the segment at
``x = col * w`` spanning row ``row``). Sub-segment vertex ids are
``segment * k + sub``; the start and goal vertices follow all sub-segments.

Inside every cell the four sides are ordered bottom, top, left, right, which is
also ascending global-id order, so one ``4k x 3k`` neighbour template serves
every cell.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import AxisSegment, min_distance, point_segment_distance
from .scenario import Scenario

BOTTOM, TOP, LEFT, RIGHT = range(4)

DEFAULT_MAX_VERTICES = 20_000_000


class GraphSizeError(MemoryError):
    """Requested discretisation exceeds the configured vertex cap."""


class NotAnEdgeError(KeyError):
    pass


@dataclass(frozen=True)
class VertexInfo:
    sub_segment: AxisSegment
    line_segment_id: int
    cell_ids: tuple
    kind: str  # "subsegment", "start" or "goal"


class LbpGraph:
    """Lower-bounding graph for an ``n x n`` grid with ``k`` sub-segments per side."""

    def __init__(self, L: float, n: int, k: int, v_max: float, start, goal):
        self.L = float(L)
        self.n = n
        self.k = k
        self.w = self.L / n
        self.v_max = float(v_max)
        self.start = (float(start[0]), float(start[1]))
        self.goal = (float(goal[0]), float(goal[1]))

        self.n_horizontal = n * (n + 1)
        self.n_line_segments = 2 * n * (n + 1)
        self.n_sub = self.n_line_segments * k
        self.s = self.n_sub
        self.d = self.n_sub + 1
        self.n_vertices = self.n_sub + 2

        self._build_segments()
        self._build_template()
        self._build_terminal_edges()

    # -------------------------------------------------------------- structure

    def _build_segments(self):
        n, k, w = self.n, self.k, self.w
        nls = self.n_line_segments
        origin = np.zeros((nls, 2))
        direction = np.zeros((nls, 2))
        cells = np.full((nls, 2), -1, dtype=np.int64)
        local = np.full((nls, 2), -1, dtype=np.int64)  # side index within each cell
        for row in range(n + 1):
            for col in range(n):
                ls = row * n + col
                origin[ls] = (col * w, row * w)
                direction[ls] = (1.0, 0.0)
                slots = []
                if row > 0:
                    slots.append(((row - 1) * n + col, TOP))
                if row < n:
                    slots.append((row * n + col, BOTTOM))
                for j, (c, side) in enumerate(sorted(slots)):
                    cells[ls, j], local[ls, j] = c, side
        for row in range(n):
            for col in range(n + 1):
                ls = self.n_horizontal + row * (n + 1) + col
                origin[ls] = (col * w, row * w)
                direction[ls] = (0.0, 1.0)
                slots = []
                if col > 0:
                    slots.append((row * n + col - 1, RIGHT))
                if col < n:
                    slots.append((row * n + col, LEFT))
                for j, (c, side) in enumerate(sorted(slots)):
                    cells[ls, j], local[ls, j] = c, side
        self.ls_origin = origin
        self.ls_direction = direction
        self.ls_cells = cells
        self.ls_side = local

        cell_vertices = np.zeros((n * n, 4 * k), dtype=np.int64)
        sub = np.arange(k)
        for row in range(n):
            for col in range(n):
                c = row * n + col
                sides = (row * n + col, (row + 1) * n + col,
                         self.n_horizontal + row * (n + 1) + col,
                         self.n_horizontal + row * (n + 1) + col + 1)
                for side, ls in enumerate(sides):
                    cell_vertices[c, side * k:(side + 1) * k] = ls * k + sub
        assert np.all(np.diff(cell_vertices, axis=1) > 0)
        self.cell_vertices = cell_vertices

    def _local_segment(self, local: int) -> AxisSegment:
        """Sub-segment geometry inside a cell anchored at the origin."""
        k, w = self.k, self.w
        side, q = divmod(local, k)
        step = w / k
        if side == BOTTOM:
            return AxisSegment((q * step, 0.0), "h", step)
        if side == TOP:
            return AxisSegment((q * step, w), "h", step)
        if side == LEFT:
            return AxisSegment((0.0, q * step), "v", step)
        return AxisSegment((w, q * step), "v", step)

    def _build_template(self):
        k = self.k
        # integer coordinates in units of w/k give exact squared distances
        def ends(local):
            side, q = divmod(local, k)
            if side == BOTTOM:
                return (q, 0), (q + 1, 0)
            if side == TOP:
                return (q, k), (q + 1, k)
            if side == LEFT:
                return (0, q), (0, q + 1)
            return (k, q), (k, q + 1)

        nbrs = np.zeros((4 * k, 3 * k), dtype=np.int64)
        dist = np.zeros((4 * k, 3 * k))
        scale = self.w / k
        for a in range(4 * k):
            (a1, a2) = ends(a)
            others = [b for b in range(4 * k) if b // k != a // k]
            nbrs[a] = others
            for j, b in enumerate(others):
                b1, b2 = ends(b)
                # axis-aligned: squared gap per coordinate between the two boxes
                gx = max(0, min(b1[0], b2[0]) - max(a1[0], a2[0]), min(a1[0], a2[0]) - max(b1[0], b2[0]))
                gy = max(0, min(b1[1], b2[1]) - max(a1[1], a2[1]), min(a1[1], a2[1]) - max(b1[1], b2[1]))
                dist[a, j] = scale * math.sqrt(gx * gx + gy * gy)
        self.template_neighbors = nbrs
        self.template_distance = dist
        self.template_cost = dist / self.v_max

    def _cells_containing(self, p):
        n, w = self.n, self.w
        cols, rows = [], []
        for coord, out in ((p[0], cols), (p[1], rows)):
            x = coord / w
            base = int(math.floor(x))
            near = round(x)
            if abs(x - near) <= 1e-9 * max(1.0, abs(x)):
                cand = [near - 1, near]
            else:
                cand = [base]
            out.extend(c for c in cand if 0 <= c < n)
        return sorted(r * n + c for r in rows for c in cols)

    def _build_terminal_edges(self):
        self.start_cells = self._cells_containing(self.start)
        self.goal_cells = self._cells_containing(self.goal)
        self.start_edges = self._terminal_edges(self.start, self.start_cells)
        self.goal_edges = self._terminal_edges(self.goal, self.goal_cells)
        shared = sorted(set(self.start_cells) & set(self.goal_cells))
        self.direct_edge = None
        if shared:
            dist = math.hypot(self.start[0] - self.goal[0], self.start[1] - self.goal[1])
            self.direct_edge = (dist / self.v_max, shared[0])
        # quick lookup: vertex -> (cost, cell) for terminal edges
        self._start_lookup = {v: (c, cell) for v, c, cell in self.start_edges}
        self._goal_lookup = {v: (c, cell) for v, c, cell in self.goal_edges}

    def _terminal_edges(self, p, cells):
        best = {}
        for cell in cells:
            for v in self.cell_vertices[cell]:
                v = int(v)
                if v in best:
                    continue
                a, b = self.sub_segment(v).endpoints
                best[v] = (point_segment_distance(p, a, b) / self.v_max, cell)
        return [(v, c, cell) for v, (c, cell) in sorted(best.items())]

    # -------------------------------------------------------------- queries

    def line_segment_of(self, v: int) -> int:
        """Line-segment id; the start and goal map to ids past the grid segments."""
        if v < self.n_sub:
            return v // self.k
        return self.n_line_segments + (v - self.n_sub)

    def sub_segment(self, v: int) -> AxisSegment:
        if v == self.s:
            return AxisSegment(self.start, "h", 0.0)
        if v == self.d:
            return AxisSegment(self.goal, "h", 0.0)
        ls, q = divmod(v, self.k)
        step = self.w / self.k
        ox, oy = self.ls_origin[ls]
        if self.ls_direction[ls, 0] == 1.0:
            return AxisSegment((ox + q * step, oy), "h", step)
        return AxisSegment((ox, oy + q * step), "v", step)

    def line_segment(self, ls: int) -> AxisSegment:
        ox, oy = self.ls_origin[ls]
        axis = "h" if self.ls_direction[ls, 0] == 1.0 else "v"
        return AxisSegment((float(ox), float(oy)), axis, self.w)

    def cells_of(self, v: int):
        if v == self.s:
            return tuple(self.start_cells)
        if v == self.d:
            return tuple(self.goal_cells)
        ls = v // self.k
        return tuple(int(c) for c in self.ls_cells[ls] if c >= 0)

    def vertex(self, v: int) -> VertexInfo:
        if not 0 <= v < self.n_vertices:
            raise IndexError(v)
        kind = "start" if v == self.s else "goal" if v == self.d else "subsegment"
        return VertexInfo(self.sub_segment(v), self.line_segment_of(v), self.cells_of(v), kind)

    def neighbor_arrays(self, v: int):
        """``(ids, costs, cells)`` arrays for all edges at ``v``, ascending by id."""
        if v == self.s or v == self.d:
            edges = self.start_edges if v == self.s else self.goal_edges
            ids = [e[0] for e in edges]
            costs = [e[1] for e in edges]
            cells = [e[2] for e in edges]
            if self.direct_edge is not None:
                ids.append(self.d if v == self.s else self.s)
                costs.append(self.direct_edge[0])
                cells.append(self.direct_edge[1])
            return (np.asarray(ids, dtype=np.int64), np.asarray(costs, dtype=float),
                    np.asarray(cells, dtype=np.int64))

        k = self.k
        ls, q = divmod(v, k)
        id_parts, cost_parts, cell_parts = [], [], []
        for j in range(2):
            cell = self.ls_cells[ls, j]
            if cell < 0:
                continue
            local = self.ls_side[ls, j] * k + q
            id_parts.append(self.cell_vertices[cell][self.template_neighbors[local]])
            cost_parts.append(self.template_cost[local])
            cell_parts.append(np.full(3 * k, cell, dtype=np.int64))
        extra_ids, extra_costs, extra_cells = [], [], []
        for lookup, term in ((self._start_lookup, self.s), (self._goal_lookup, self.d)):
            hit = lookup.get(v)
            if hit is not None:
                extra_ids.append(term)
                extra_costs.append(hit[0])
                extra_cells.append(hit[1])
        ids = np.concatenate(id_parts + [np.asarray(extra_ids, dtype=np.int64)])
        costs = np.concatenate(cost_parts + [np.asarray(extra_costs, dtype=float)])
        cells = np.concatenate(cell_parts + [np.asarray(extra_cells, dtype=np.int64)])
        if len(id_parts) > 1 or extra_ids:
            order = np.argsort(ids, kind="stable")
            ids, costs, cells = ids[order], costs[order], cells[order]
        return ids, costs, cells

    def neighbors(self, v: int):
        """List of ``(u, cost, cell)`` for every edge at ``v``, ascending by ``u``."""
        ids, costs, cells = self.neighbor_arrays(v)
        return [(int(u), float(c), int(cell)) for u, c, cell in zip(ids, costs, cells)]

    def _find_edge(self, u: int, v: int):
        for w_, c, cell in self.neighbors(u):
            if w_ == v:
                return c, cell
        raise NotAnEdgeError(f"({u}, {v}) is not an edge")

    def edge_cost(self, u: int, v: int) -> float:
        return self._find_edge(u, v)[0]

    def cell_of_edge(self, u: int, v: int) -> int:
        return self._find_edge(u, v)[1]

    def max_degree(self) -> int:
        return max(len(self.neighbor_arrays(v)[0]) for v in range(self.n_vertices))

    def subsegment_degrees(self) -> np.ndarray:
        """Sub-segment neighbour count of every sub-segment vertex.

        Accumulated from the per-cell vertex table and the shared template;
        edges to the start and goal are left out (they add at most two).
        """
        per_local = (self.template_neighbors >= 0).sum(axis=1)
        deg = np.zeros(self.n_sub, dtype=np.int64)
        np.add.at(deg, self.cell_vertices.ravel(), np.tile(per_local, self.n * self.n))
        return deg

    def iter_edges(self):
        """Yield each undirected edge once as ``(u, v, cost, cell)`` with ``u < v``."""
        for u in range(self.n_vertices):
            ids, costs, cells = self.neighbor_arrays(u)
            for v, c, cell in zip(ids, costs, cells):
                if u < v:
                    yield u, int(v), float(c), int(cell)

    def edges_csv(self) -> str:
        rows = ["u,v,cost,cell"] + [f"{u},{v},{c!r},{cell}" for u, v, c, cell in self.iter_edges()]
        return "\n".join(rows) + "\n"


def build_graph(scenario: Scenario, n: int, k: int, max_vertices: int = DEFAULT_MAX_VERTICES) -> LbpGraph:
    """Build the (w, k) lower-bounding graph with ``w = L / n``."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    n_vertices = 2 * k * (n * n + n) + 2
    if n_vertices > max_vertices:
        raise GraphSizeError(f"{n_vertices} vertices exceeds cap {max_vertices}")
    return LbpGraph(scenario.L, n, k, scenario.v_max, scenario.start, scenario.goal)


def edge_cost(g: LbpGraph, u: int, v: int) -> float:
    return g.edge_cost(u, v)


def neighbors(g: LbpGraph, v: int):
    return g.neighbors(v)


def cell_of_edge(g: LbpGraph, u: int, v: int) -> int:
    return g.cell_of_edge(u, v)


def geometric_edge_cost(g: LbpGraph, u: int, v: int) -> float:
    """Edge cost recomputed from world-frame geometry (for cross-checks)."""
    return min_distance(g.sub_segment(u), g.sub_segment(v)) / g.v_max
