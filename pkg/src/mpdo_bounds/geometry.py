"""2D predicates on closed sets: segment distance, coverage, containment, collision."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .scenario import Bar, ConvexPolygon, Disc, Obstacle, Scenario

MERGE_TOL = 1e-9
_EPS = 1e-12


@dataclass(frozen=True)
class AxisSegment:
    """Axis-aligned closed segment; ``length == 0`` encodes a single point."""

    origin: tuple
    axis: str  # "h" or "v"
    length: float

    def __post_init__(self):
        if self.axis not in ("h", "v"):
            raise ValueError("axis must be 'h' or 'v'")
        if self.length < 0:
            raise ValueError("length must be >= 0")

    @property
    def is_point(self) -> bool:
        return self.length == 0

    @property
    def direction(self) -> tuple:
        return (1.0, 0.0) if self.axis == "h" else (0.0, 1.0)

    @property
    def endpoints(self):
        ox, oy = self.origin
        if self.axis == "h":
            return (ox, oy), (ox + self.length, oy)
        return (ox, oy), (ox, oy + self.length)

    def point_at(self, u: float):
        ox, oy = self.origin
        dx, dy = self.direction
        return (ox + u * self.length * dx, oy + u * self.length * dy)


class CoverInterval(NamedTuple):
    lo: float
    hi: float


# ---------------------------------------------------------------- distances

def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def point_segment_distance(p, a, b) -> float:
    px, py = p
    ax, ay = a
    bx, by = b
    ex, ey = bx - ax, by - ay
    den = ex * ex + ey * ey
    if den == 0:
        return math.hypot(px - ax, py - ay)
    u = ((px - ax) * ex + (py - ay) * ey) / den
    u = min(1.0, max(0.0, u))
    return math.hypot(px - (ax + u * ex), py - (ay + u * ey))


def _orient(a, b, c):
    return _cross(b[0] - a[0], b[1] - a[1], c[0] - a[0], c[1] - a[1])


def _on_segment(a, b, p):
    return (min(a[0], b[0]) - _EPS <= p[0] <= max(a[0], b[0]) + _EPS
            and min(a[1], b[1]) - _EPS <= p[1] <= max(a[1], b[1]) + _EPS)


def segments_intersect(a1, a2, b1, b2) -> bool:
    """Closed-segment intersection, touching and collinear overlap included."""
    d1 = _orient(b1, b2, a1)
    d2 = _orient(b1, b2, a2)
    d3 = _orient(a1, a2, b1)
    d4 = _orient(a1, a2, b2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(b1, b2, a1):
        return True
    if d2 == 0 and _on_segment(b1, b2, a2):
        return True
    if d3 == 0 and _on_segment(a1, a2, b1):
        return True
    if d4 == 0 and _on_segment(a1, a2, b2):
        return True
    return False


def segments_cross_properly(a1, a2, b1, b2) -> bool:
    """True when the open interiors cross at a single point (no touching)."""
    d1 = _orient(b1, b2, a1)
    d2 = _orient(b1, b2, a2)
    d3 = _orient(a1, a2, b1)
    d4 = _orient(a1, a2, b2)
    return d1 * d2 < 0 and d3 * d4 < 0


def segment_segment_distance(a1, a2, b1, b2) -> float:
    if segments_intersect(a1, a2, b1, b2):
        return 0.0
    return min(point_segment_distance(a1, b1, b2), point_segment_distance(a2, b1, b2),
               point_segment_distance(b1, a1, a2), point_segment_distance(b2, a1, a2))


def min_distance(a: AxisSegment, b: AxisSegment) -> float:
    """Minimum Euclidean distance between two closed segments (0 if they touch)."""
    return segment_segment_distance(*a.endpoints, *b.endpoints)


# ---------------------------------------------------------------- coverage

def _world_vertices(shape: ConvexPolygon, tx, ty):
    return [(vx + tx, vy + ty) for vx, vy in shape.vertices]


def shape_cover_interval(seg: AxisSegment, obstacle: Obstacle, t: float, margin: float = 0.0):
    """Parameter interval of ``seg`` inside the closed obstacle at time ``t``.

    ``margin`` shrinks the obstacle by that distance first. Returns an empty
    list or a single ``CoverInterval``.
    """
    tx, ty = (float(c) for c in obstacle.trajectory.translation(t))
    shape = obstacle.shape
    (ox, oy), _ = seg.endpoints
    dx, dy = seg.direction
    length = seg.length

    if isinstance(shape, Disc):
        r = shape.radius - margin
        if r < 0:
            return []
        rx, ry = tx - ox, ty - oy
        along = rx * dx + ry * dy
        perp = _cross(dx, dy, rx, ry)
        if abs(perp) > r:
            return []
        half = math.sqrt(r * r - perp * perp)
        if length == 0:
            return [CoverInterval(0.0, 1.0)] if abs(along) <= half else []
        lo, hi = (along - half) / length, (along + half) / length

    elif isinstance(shape, ConvexPolygon):
        lo, hi = -math.inf, math.inf
        for (ax, ay), (bx, by) in shape.edges():
            ax, ay, bx, by = ax + tx, ay + ty, bx + tx, by + ty
            ex, ey = bx - ax, by - ay
            elen = math.hypot(ex, ey)
            nx, ny = ey / elen, -ex / elen  # outward normal for ccw order
            alpha = length * (nx * dx + ny * dy)
            beta = nx * (ox - ax) + ny * (oy - ay) + margin
            if abs(alpha) < _EPS:
                if beta > _EPS:
                    return []
                continue
            root = -beta / alpha
            if alpha > 0:
                hi = min(hi, root)
            else:
                lo = max(lo, root)
        if length == 0:
            return [CoverInterval(0.0, 1.0)]

    elif isinstance(shape, Bar):
        if margin > 0:
            return []
        ax, ay = shape.a[0] + tx, shape.a[1] + ty
        bx, by = shape.b[0] + tx, shape.b[1] + ty
        if length == 0:
            return [CoverInterval(0.0, 1.0)] if point_on_bar((ox, oy), (ax, ay), (bx, by)) else []
        tol = 1e-9 * max(1.0, length)
        if abs(_cross(dx, dy, ax - ox, ay - oy)) > tol or abs(_cross(dx, dy, bx - ox, by - oy)) > tol:
            return []
        ua = ((ax - ox) * dx + (ay - oy) * dy) / length
        ub = ((bx - ox) * dx + (by - oy) * dy) / length
        lo, hi = min(ua, ub), max(ua, ub)
    else:
        raise TypeError(f"unsupported shape {shape!r}")

    lo, hi = max(lo, 0.0), min(hi, 1.0)
    if lo > hi:
        return []
    return [CoverInterval(lo, hi)]


def intervals_cover_unit(intervals, tol: float = MERGE_TOL) -> bool:
    """Whether the union of closed intervals covers [0, 1] (gaps <= tol merge)."""
    reach = 0.0
    started = False
    for lo, hi in sorted(intervals):
        if lo > reach + tol:
            break
        started = True
        reach = max(reach, hi)
        if reach >= 1.0 - tol:
            return True
    return started and reach >= 1.0 - tol


def segment_covered(seg: AxisSegment, scenario: Scenario, t: float, margins=None) -> bool:
    """True iff ``seg`` lies inside the union of obstacles at time ``t``."""
    if seg.is_point:
        return point_in_union(seg.origin, scenario, t)
    pieces = []
    for i, ob in enumerate(scenario.obstacles):
        m = 0.0 if margins is None else margins[i]
        pieces.extend(shape_cover_interval(seg, ob, t, m))
    return intervals_cover_unit(pieces)


def point_on_bar(p, a, b, tol: float = _EPS) -> bool:
    ex, ey = b[0] - a[0], b[1] - a[1]
    if abs(_cross(ex, ey, p[0] - a[0], p[1] - a[1])) > tol * max(1.0, math.hypot(ex, ey)):
        return False
    return _on_segment(a, b, p)


def point_in_obstacle(p, obstacle: Obstacle, t: float) -> bool:
    tx, ty = (float(c) for c in obstacle.trajectory.translation(t))
    px, py = p[0] - tx, p[1] - ty
    shape = obstacle.shape
    if isinstance(shape, Disc):
        return px * px + py * py <= shape.radius * shape.radius
    if isinstance(shape, ConvexPolygon):
        return all(_cross(bx - ax, by - ay, px - ax, py - ay) >= 0 for (ax, ay), (bx, by) in shape.edges())
    return point_on_bar((px, py), shape.a, shape.b)


def point_in_union(p, scenario: Scenario, t: float) -> bool:
    """Closed-set containment of ``p`` in any obstacle at time ``t``."""
    return any(point_in_obstacle(p, ob, t) for ob in scenario.obstacles)


# ---------------------------------------------------------------- collision

def _segment_hits_shape(q1, q2, shape) -> bool:
    """Does the closed body-frame segment q1-q2 meet the closed shape?"""
    if isinstance(shape, Disc):
        return point_segment_distance((0.0, 0.0), q1, q2) <= shape.radius
    if isinstance(shape, Bar):
        return segments_intersect(q1, q2, shape.a, shape.b)
    # convex polygon: Cyrus-Beck clipping of the segment against each half-plane
    lo, hi = 0.0, 1.0
    dx, dy = q2[0] - q1[0], q2[1] - q1[1]
    for (ax, ay), (bx, by) in shape.edges():
        ex, ey = bx - ax, by - ay
        # inside: cross(e, q - a) >= 0
        c0 = _cross(ex, ey, q1[0] - ax, q1[1] - ay)
        c1 = _cross(ex, ey, dx, dy)
        if abs(c1) < _EPS:
            if c0 < 0:
                return False
            continue
        root = -c0 / c1
        if c1 > 0:
            lo = max(lo, root)
        else:
            hi = min(hi, root)
        if lo > hi:
            return False
    return True


def moving_point_collides(p1, t1: float, p2, t2: float, scenario: Scenario, dt_check: float = 0.1) -> bool:
    """Whether linear robot motion p1@t1 -> p2@t2 touches any obstacle.

    The motion is split at every obstacle waypoint time and at least every
    ``dt_check`` seconds; within a piece both robot and obstacle translate
    linearly, so the relative motion is a segment tested exactly against the
    body-frame shape.
    """
    if t2 < t1:
        raise ValueError("t2 must be >= t1")
    p1 = (float(p1[0]), float(p1[1]))
    p2 = (float(p2[0]), float(p2[1]))
    if not scenario.obstacles:
        return False
    if t2 == t1:
        return point_in_union(p1, scenario, t1) or (p1 != p2 and _static_sweep_hits(p1, p2, scenario, t1))
    steps = max(1, int(math.ceil((t2 - t1) / dt_check - 1e-9)))
    base = np.linspace(t1, t2, steps + 1)
    span = t2 - t1
    for ob in scenario.obstacles:
        wt = ob.trajectory.times
        cuts = np.union1d(base, wt[(wt > t1) & (wt < t2)])
        fr = (cuts - t1) / span
        rx = p1[0] + fr * (p2[0] - p1[0])
        ry = p1[1] + fr * (p2[1] - p1[1])
        ox, oy = ob.trajectory.translation(cuts)
        qx, qy = rx - ox, ry - oy
        for i in range(len(cuts) - 1):
            if _segment_hits_shape((qx[i], qy[i]), (qx[i + 1], qy[i + 1]), ob.shape):
                return True
    return False


def _static_sweep_hits(p1, p2, scenario, t):
    for ob in scenario.obstacles:
        tx, ty = (float(c) for c in ob.trajectory.translation(t))
        if _segment_hits_shape((p1[0] - tx, p1[1] - ty), (p2[0] - tx, p2[1] - ty), ob.shape):
            return True
    return False


# ---------------------------------------------------------------- batched forms

def cover_bounds_batch(origins: np.ndarray, dirs: np.ndarray, length: float,
                       obstacle: Obstacle, t: float, margin: float = 0.0):
    """Vectorised ``shape_cover_interval`` for many equal-length segments.

    Returns ``(lo, hi)`` arrays; empty intervals have ``lo > hi``.
    """
    tx, ty = (float(c) for c in obstacle.trajectory.translation(t))
    shape = obstacle.shape
    m = len(origins)
    ox, oy = origins[:, 0], origins[:, 1]
    dx, dy = dirs[:, 0], dirs[:, 1]
    empty = (np.full(m, np.inf), np.full(m, -np.inf))

    if isinstance(shape, Disc):
        r = shape.radius - margin
        if r < 0:
            return empty
        rx, ry = tx - ox, ty - oy
        along = rx * dx + ry * dy
        perp = dx * ry - dy * rx
        ok = np.abs(perp) <= r
        half = np.sqrt(np.where(ok, r * r - perp * perp, 0.0))
        lo = np.where(ok, (along - half) / length, np.inf)
        hi = np.where(ok, (along + half) / length, -np.inf)

    elif isinstance(shape, ConvexPolygon):
        lo = np.full(m, -np.inf)
        hi = np.full(m, np.inf)
        for (ax, ay), (bx, by) in shape.edges():
            ax, ay, bx, by = ax + tx, ay + ty, bx + tx, by + ty
            ex, ey = bx - ax, by - ay
            elen = math.hypot(ex, ey)
            nx, ny = ey / elen, -ex / elen
            alpha = length * (nx * dx + ny * dy)
            beta = nx * (ox - ax) + ny * (oy - ay) + margin
            flat = np.abs(alpha) < _EPS
            with np.errstate(divide="ignore", invalid="ignore"):
                root = np.where(flat, 0.0, -beta / np.where(flat, 1.0, alpha))
            hi = np.where(~flat & (alpha > 0), np.minimum(hi, root), hi)
            lo = np.where(~flat & (alpha < 0), np.maximum(lo, root), lo)
            dead = flat & (beta > _EPS)
            lo = np.where(dead, np.inf, lo)
            hi = np.where(dead, -np.inf, hi)

    elif isinstance(shape, Bar):
        if margin > 0:
            return empty
        ax, ay = shape.a[0] + tx, shape.a[1] + ty
        bx, by = shape.b[0] + tx, shape.b[1] + ty
        tol = 1e-9 * max(1.0, length)
        col = (np.abs(dx * (ay - oy) - dy * (ax - ox)) <= tol) & (np.abs(dx * (by - oy) - dy * (bx - ox)) <= tol)
        ua = ((ax - ox) * dx + (ay - oy) * dy) / length
        ub = ((bx - ox) * dx + (by - oy) * dy) / length
        lo = np.where(col, np.minimum(ua, ub), np.inf)
        hi = np.where(col, np.maximum(ua, ub), -np.inf)
    else:
        raise TypeError(f"unsupported shape {shape!r}")

    lo = np.maximum(lo, 0.0)
    hi = np.minimum(hi, 1.0)
    return lo, hi


def union_covers_batch(lo: np.ndarray, hi: np.ndarray, tol: float = MERGE_TOL) -> np.ndarray:
    """Row-wise: does the union of intervals ``[lo[i,j], hi[i,j]]`` cover [0, 1]?"""
    if lo.shape[1] == 0:
        return np.zeros(lo.shape[0], dtype=bool)
    valid = lo <= hi
    lo = np.where(valid, lo, np.inf)
    hi = np.where(valid, hi, -np.inf)
    order = np.argsort(lo, axis=1, kind="stable")
    lo = np.take_along_axis(lo, order, axis=1)
    hi = np.take_along_axis(hi, order, axis=1)
    reach = np.maximum.accumulate(hi, axis=1)
    prev = np.concatenate([np.zeros((lo.shape[0], 1)), reach[:, :-1]], axis=1)
    prev[:, 1:] = np.maximum(prev[:, 1:], 0.0)
    joined = lo <= prev + tol
    # an interval only counts while every earlier one joined the chain
    chain = np.logical_and.accumulate(joined, axis=1)
    best = np.max(np.where(chain, reach, -np.inf), axis=1)
    return best >= 1.0 - tol


def points_in_union_batch(points: np.ndarray, scenario: Scenario, t: float, inflation: float = 0.0) -> np.ndarray:
    """Vectorised closed containment in the obstacle union grown by ``inflation``."""
    hit = np.zeros(len(points), dtype=bool)
    px, py = points[:, 0], points[:, 1]
    for ob in scenario.obstacles:
        tx, ty = (float(c) for c in ob.trajectory.translation(t))
        qx, qy = px - tx, py - ty
        shape = ob.shape
        if isinstance(shape, Disc):
            rr = shape.radius + inflation
            hit |= qx * qx + qy * qy <= rr * rr
        elif isinstance(shape, Bar):
            hit |= _point_seg_dist_batch(qx, qy, shape.a, shape.b) <= inflation + (_EPS if inflation == 0 else 0.0)
        else:
            inside = np.ones(len(points), dtype=bool)
            for (ax, ay), (bx, by) in shape.edges():
                inside &= (bx - ax) * (qy - ay) - (by - ay) * (qx - ax) >= 0
            if inflation > 0:
                near = np.zeros(len(points), dtype=bool)
                for a, b in shape.edges():
                    near |= _point_seg_dist_batch(qx, qy, a, b) <= inflation
                inside |= near
            hit |= inside
    return hit


def _point_seg_dist_batch(px, py, a, b):
    ax, ay = a
    ex, ey = b[0] - ax, b[1] - ay
    den = ex * ex + ey * ey
    u = np.clip(((px - ax) * ex + (py - ay) * ey) / den, 0.0, 1.0)
    return np.hypot(px - (ax + u * ex), py - (ay + u * ey))
