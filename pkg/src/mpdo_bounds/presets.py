"""Reconstructed benchmark instances.

``exp1`` is exact: two static vertical bars whose tips at (0.2, 0.7) and
(0.8, 0.7) make the optimal path bend twice, giving an optimum of
``(0.4 * sqrt(2) + 0.6) / v_max``. ``exp2`` and ``exp3`` pick obstacle speeds
and bar placements that are not given for the original instances; their
numbers are reproductions in shape only.
"""
from __future__ import annotations

import math

from .scenario import Bar, Disc, Obstacle, Scenario, Trajectory, generate_random_scenario

L = 1.0
V_MAX = 0.03
HORIZON = 100.0
START = (0.0, 0.5)
GOAL = (1.0, 0.5)

EXP1_OPTIMUM = (0.4 * math.sqrt(2) + 0.6) / V_MAX

# exp2: disc of radius 0.25 drifting from the centre to the left border
EXP2_RADIUS = 0.25
EXP2_SPEED = 0.01

# exp3: ten wandering discs plus two bars
EXP3_RADIUS = 0.15
EXP3_SEED = 2
EXP3_OBSTACLE_SPEED = 0.01
EXP3_BARS = (((0.2, 0.0), (0.2, 0.7)), ((0.8, 0.0), (0.8, 0.6)))

PRESETS = ("exp1", "exp2", "exp3", "random")


def _static(shape):
    return Obstacle(shape, Trajectory(((0.0, 0.0, 0.0),)))


def exp1() -> Scenario:
    bars = (_static(Bar((0.2, 0.0), (0.2, 0.7))), _static(Bar((0.8, 0.0), (0.8, 0.7))))
    return Scenario(L, HORIZON, V_MAX, START, GOAL, bars, name="exp1")


def exp2(speed: float = EXP2_SPEED) -> Scenario:
    travel = 0.5 / speed
    traj = Trajectory(((0.0, 0.5, 0.5), (travel, 0.0, 0.5), (max(HORIZON, travel + 1.0), 0.0, 0.5)))
    return Scenario(L, HORIZON, V_MAX, START, GOAL, (Obstacle(Disc(EXP2_RADIUS), traj),), name="exp2")


def exp3_bars():
    return tuple(_static(Bar(a, b)) for a, b in EXP3_BARS)


def exp3(seed: int = EXP3_SEED) -> Scenario:
    return generate_random_scenario(seed, 10, EXP3_RADIUS, L=L, T=HORIZON, v_max=V_MAX, start=START,
                                    goal=GOAL, obstacle_speed=EXP3_OBSTACLE_SPEED, static=exp3_bars(),
                                    name=f"exp3-{seed}")


def random_preset(seed: int) -> Scenario:
    return generate_random_scenario(seed, 10, 0.15, L=L, T=HORIZON, v_max=V_MAX, start=START, goal=GOAL)


def make_preset(name: str, seed: int = 0) -> Scenario:
    if name == "exp1":
        return exp1()
    if name == "exp2":
        return exp2()
    if name == "exp3":
        return exp3(seed if seed else EXP3_SEED)
    if name == "random":
        return random_preset(seed)
    raise ValueError(f"unknown preset {name!r}; choose from {PRESETS}")
