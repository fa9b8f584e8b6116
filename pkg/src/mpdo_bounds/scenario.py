"""Problem instances: workspace, robot limits, obstacle shapes and their motions.

Obstacles translate along piecewise-linear waypoint trajectories. Scenario files
are JSON documents, see ``load_scenario`` for the schema.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np


class ScenarioError(ValueError):
    """Raised when a scenario document fails to parse or validate."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class Disc:
    radius: float


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon with counter-clockwise body-frame vertices."""

    vertices: tuple

    def edges(self):
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]


@dataclass(frozen=True)
class Bar:
    """Zero-width segment between two body-frame endpoints."""

    a: tuple
    b: tuple


Shape = Union[Disc, ConvexPolygon, Bar]


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-linear translation through ``(time, dx, dy)`` waypoints."""

    waypoints: tuple

    def __post_init__(self):
        wp = np.asarray(self.waypoints, dtype=float).reshape(-1, 3)
        object.__setattr__(self, "_times", wp[:, 0].copy())
        object.__setattr__(self, "_xs", wp[:, 1].copy())
        object.__setattr__(self, "_ys", wp[:, 2].copy())

    @property
    def times(self) -> np.ndarray:
        return self._times

    @property
    def is_static(self) -> bool:
        return bool(np.all(self._xs == self._xs[0]) and np.all(self._ys == self._ys[0]))

    def max_speed(self) -> float:
        if len(self._times) < 2:
            return 0.0
        dt = np.diff(self._times)
        dist = np.hypot(np.diff(self._xs), np.diff(self._ys))
        return float(np.max(dist / dt))

    def translation(self, t):
        """Vectorised pose lookup without domain checks (``t`` scalar or array)."""
        return np.interp(t, self._times, self._xs), np.interp(t, self._times, self._ys)


def pose_at(trajectory: Trajectory, t: float, horizon: float | None = None) -> np.ndarray:
    """Translation of ``trajectory`` at time ``t``.

    Linear between bracketing waypoints, constant after the last one.
    """
    if t < 0 or (horizon is not None and t > horizon) or not math.isfinite(t):
        raise ValueError(f"time {t} outside [0, {horizon if horizon is not None else 'T'}]")
    x, y = trajectory.translation(t)
    return np.array([float(x), float(y)])


@dataclass(frozen=True)
class Obstacle:
    shape: Shape
    trajectory: Trajectory

    def max_speed(self) -> float:
        return self.trajectory.max_speed()

    @property
    def is_static(self) -> bool:
        return self.trajectory.is_static


@dataclass(frozen=True)
class Scenario:
    L: float
    T: float
    v_max: float
    start: tuple
    goal: tuple
    obstacles: tuple = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(float(c) for c in self.start))
        object.__setattr__(self, "goal", tuple(float(c) for c in self.goal))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        validate_scenario(self)

    def max_obstacle_speed(self) -> float:
        return max((o.max_speed() for o in self.obstacles), default=0.0)

    def static_obstacles(self):
        return [o for o in self.obstacles if o.is_static]


@dataclass
class RobotTrajectory:
    """Piecewise-linear robot motion through ``(t, x, y)`` samples."""

    samples: list = field(default_factory=list)

    @property
    def total_cost(self) -> float:
        return float(self.samples[-1][0])

    def to_csv(self) -> str:
        lines = ["t,x,y"]
        lines += [f"{t!r},{x!r},{y!r}" for t, x, y in self.samples]
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- validation

def _check_convex_ccw(vertices, path):
    n = len(vertices)
    if n < 3:
        raise ScenarioError(path, "polygon needs at least 3 vertices")
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        cx, cy = vertices[(i + 2) % n]
        cross = (bx - ax) * (cy - by) - (by - ay) * (cx - bx)
        if cross <= 0:
            raise ScenarioError(path, "polygon must be convex with counter-clockwise vertices")


def validate_scenario(sc: Scenario) -> None:
    for name in ("L", "T", "v_max"):
        val = getattr(sc, name)
        if not (math.isfinite(val) and val > 0):
            raise ScenarioError(name, "must be a positive finite number")
    for name in ("start", "goal"):
        p = getattr(sc, name)
        if len(p) != 2 or not all(0.0 <= c <= sc.L for c in p):
            raise ScenarioError(name, f"must lie inside [0, {sc.L}]^2")
    for i, ob in enumerate(sc.obstacles):
        base = f"obstacles[{i}]"
        shape = ob.shape
        if isinstance(shape, Disc):
            if not shape.radius > 0:
                raise ScenarioError(base + ".radius", "must be > 0")
        elif isinstance(shape, ConvexPolygon):
            _check_convex_ccw(shape.vertices, base + ".vertices")
        elif isinstance(shape, Bar):
            if tuple(shape.a) == tuple(shape.b):
                raise ScenarioError(base, "bar endpoints must be distinct")
        else:
            raise ScenarioError(base + ".shape", f"unsupported shape {shape!r}")
        times = ob.trajectory.times
        if len(times) == 0:
            raise ScenarioError(base + ".waypoints", "at least one waypoint required")
        if times[0] != 0.0:
            raise ScenarioError(base + ".waypoints[0]", "first waypoint time must be 0")
        if np.any(np.diff(times) <= 0):
            raise ScenarioError(base + ".waypoints", "times must be strictly increasing")
        if len(times) > 1 and times[-1] < sc.T:
            raise ScenarioError(base + ".waypoints", f"last waypoint time must be >= T={sc.T}")


# ---------------------------------------------------------------- (de)serialisation

_TOP_KEYS = {"L", "T", "v_max", "start", "goal", "obstacles", "name"}
_SHAPE_KEYS = {"disc": {"radius"}, "polygon": {"vertices"}, "bar": {"a", "b"}}


def _num(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(path, "expected a number")
    return float(value)


def _point(value, path):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ScenarioError(path, "expected [x, y]")
    return (_num(value[0], path + "[0]"), _num(value[1], path + "[1]"))


def _obstacle_from_dict(d, path) -> Obstacle:
    if not isinstance(d, dict):
        raise ScenarioError(path, "expected an object")
    kind = d.get("shape")
    if kind not in _SHAPE_KEYS:
        raise ScenarioError(path + ".shape", f"must be one of {sorted(_SHAPE_KEYS)}")
    allowed = {"shape", "waypoints"} | _SHAPE_KEYS[kind]
    unknown = set(d) - allowed
    if unknown:
        raise ScenarioError(f"{path}.{sorted(unknown)[0]}", f"unknown fields {sorted(unknown)}")
    missing = allowed - set(d)
    if missing:
        raise ScenarioError(path, f"missing fields {sorted(missing)}")
    if kind == "disc":
        shape = Disc(_num(d["radius"], path + ".radius"))
    elif kind == "polygon":
        verts = d["vertices"]
        if not isinstance(verts, list):
            raise ScenarioError(path + ".vertices", "expected a list of points")
        shape = ConvexPolygon(tuple(_point(v, f"{path}.vertices[{j}]") for j, v in enumerate(verts)))
    else:
        shape = Bar(_point(d["a"], path + ".a"), _point(d["b"], path + ".b"))
    wps = d["waypoints"]
    if not isinstance(wps, list) or not wps:
        raise ScenarioError(path + ".waypoints", "expected a non-empty list of [t, dx, dy]")
    rows = []
    for j, w in enumerate(wps):
        if not isinstance(w, list) or len(w) != 3:
            raise ScenarioError(f"{path}.waypoints[{j}]", "expected [t, dx, dy]")
        rows.append(tuple(_num(c, f"{path}.waypoints[{j}]") for c in w))
    return Obstacle(shape, Trajectory(tuple(rows)))


def scenario_from_dict(doc) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("", "scenario document must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ScenarioError(sorted(unknown)[0], f"unknown fields {sorted(unknown)}")
    for key in ("L", "T", "v_max", "start", "goal", "obstacles"):
        if key not in doc:
            raise ScenarioError(key, "missing")
    obs = doc["obstacles"]
    if not isinstance(obs, list):
        raise ScenarioError("obstacles", "expected a list")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise ScenarioError("name", "expected a string")
    return Scenario(
        L=_num(doc["L"], "L"),
        T=_num(doc["T"], "T"),
        v_max=_num(doc["v_max"], "v_max"),
        start=_point(doc["start"], "start"),
        goal=_point(doc["goal"], "goal"),
        obstacles=tuple(_obstacle_from_dict(o, f"obstacles[{i}]") for i, o in enumerate(obs)),
        name=name,
    )


def load_scenario(text: bytes | str) -> Scenario:
    """Parse and validate a scenario document.

    Schema::

        {"name": "...",                       # optional
         "L": 1.0, "T": 100.0, "v_max": 0.03,
         "start": [x, y], "goal": [x, y],
         "obstacles": [
            {"shape": "disc", "radius": r, "waypoints": [[t, dx, dy], ...]},
            {"shape": "polygon", "vertices": [[x, y], ...], "waypoints": ...},
            {"shape": "bar", "a": [x, y], "b": [x, y], "waypoints": ...}]}

    Shapes are given in their body frame; waypoints translate the body frame.
    Unknown fields are rejected.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("", f"invalid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def load_scenario_file(path) -> Scenario:
    with open(path, "rb") as fh:
        return load_scenario(fh.read())


def scenario_to_dict(sc: Scenario) -> dict:
    obs = []
    for ob in sc.obstacles:
        s = ob.shape
        if isinstance(s, Disc):
            d = {"shape": "disc", "radius": s.radius}
        elif isinstance(s, ConvexPolygon):
            d = {"shape": "polygon", "vertices": [list(v) for v in s.vertices]}
        else:
            d = {"shape": "bar", "a": list(s.a), "b": list(s.b)}
        d["waypoints"] = [list(w) for w in ob.trajectory.waypoints]
        obs.append(d)
    doc = {"L": sc.L, "T": sc.T, "v_max": sc.v_max, "start": list(sc.start),
           "goal": list(sc.goal), "obstacles": obs}
    if sc.name:
        doc["name"] = sc.name
    return doc


def dump_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- generation

def _random_disc_trajectory(rng, center, horizon, L, margin, max_speed, leg_time):
    wps = [(0.0, float(center[0]), float(center[1]))]
    t, pos = 0.0, np.asarray(center, dtype=float)
    while t < horizon:
        target = rng.uniform(margin, L - margin, size=2)
        dist = float(np.hypot(*(target - pos)))
        speed = rng.uniform(0.5, 1.0) * max_speed
        dur = max(dist / speed, leg_time)
        t += dur
        wps.append((t, float(target[0]), float(target[1])))
        pos = target
    return Trajectory(tuple(wps))


def generate_random_scenario(seed: int, num_obstacles: int = 10, radius: float = 0.15, *,
                             L: float = 1.0, T: float = 100.0, v_max: float = 0.03,
                             start: Sequence[float] = (0.0, 0.5), goal: Sequence[float] = (1.0, 0.5),
                             obstacle_speed: float = 0.01, min_leg_time: float = 5.0,
                             static: Sequence[Obstacle] = (), name: str = "") -> Scenario:
    """Discs of ``radius`` starting at the workspace centre and wandering randomly.

    Each disc visits uniformly drawn waypoints (centres kept inside the
    workspace) at speeds in ``[0.5, 1] * obstacle_speed``. ``static`` obstacles
    are appended unchanged. Pure function of its arguments.
    """
    if num_obstacles < 0:
        raise ValueError("num_obstacles must be >= 0")
    if not (0 < radius and 0 < obstacle_speed and L > 0 and T > 0):
        raise ValueError("radius, obstacle_speed, L and T must be positive")
    rng = np.random.default_rng(seed)
    center = (L / 2, L / 2)
    obs = [Obstacle(Disc(float(radius)),
                    _random_disc_trajectory(rng, center, T, L, 0.0, obstacle_speed, min_leg_time))
           for _ in range(num_obstacles)]
    obs.extend(static)
    return Scenario(L=L, T=T, v_max=v_max, start=tuple(start), goal=tuple(goal),
                    obstacles=tuple(obs), name=name or f"random-{seed}")
