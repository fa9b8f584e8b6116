import math

import numpy as np
import pytest

from mpdo_bounds import presets
from mpdo_bounds.baselines import (RRTParams, baseline_lower_bound, build_visibility_graph, rrt_plan, sipp_plan,
                                   validate_trajectory)
from mpdo_bounds.discretization import build_graph
from mpdo_bounds.geometry import point_in_union
from mpdo_bounds.reachability import compute_reachable_intervals
from mpdo_bounds.scenario import (Bar, ConvexPolygon, Disc, Obstacle, RobotTrajectory, Scenario, Trajectory)
from mpdo_bounds.search import solve

EMPTY = Scenario(1.0, 100.0, 0.03, (0.0, 0.5), (1.0, 0.5))


def static(shape, x=0.0, y=0.0):
    return Obstacle(shape, Trajectory(((0.0, x, y),)))


# ---------------------------------------------------------------- visibility baseline

def test_baseline_exp2(exp2):
    cost, path = baseline_lower_bound(exp2)
    assert cost == pytest.approx(1 / 0.03, abs=1e-12)
    assert path == [(0.0, 0.5), (1.0, 0.5)]


def test_baseline_exp1(exp1):
    cost, path = baseline_lower_bound(exp1)
    assert cost == pytest.approx((0.4 * math.sqrt(2) + 0.6) / 0.03, abs=1e-9)
    assert round(cost, 2) == 38.86
    assert path == [(0.0, 0.5), (0.2, 0.7), (0.8, 0.7), (1.0, 0.5)]


def test_baseline_exp3(exp3):
    cost, _ = baseline_lower_bound(exp3)
    assert round(cost, 2) == 37.16


def test_visibility_graph_empty_is_single_edge():
    vg = build_visibility_graph(EMPTY)
    assert len(vg.nodes) == 2
    assert [v for v, _ in vg.edges[0]] == [1]


def test_visibility_edges_avoid_static_obstacles(exp3):
    sc = Scenario(1.0, 100.0, 0.03, (0.0, 0.5), (1.0, 0.5),
                  presets.exp3_bars() + (static(ConvexPolygon(((0.0, 0.0), (0.15, 0.0), (0.15, 0.2), (0.0, 0.2))),
                                                0.42, 0.55),))
    vg = build_visibility_graph(sc)
    for i, nbrs in vg.edges.items():
        for j, _ in nbrs:
            p, q = np.array(vg.nodes[i]), np.array(vg.nodes[j])
            for u in np.linspace(0.01, 0.99, 99):
                x = p + u * (q - p)
                if min(np.linalg.norm(x - p), np.linalg.norm(x - q)) < 1e-6:
                    continue
                inside = point_in_union(tuple(x), sc, 0.0)
                # grazing a polygon boundary is allowed; only interior points would be a crossing
                if inside:
                    shrunk = [tuple(x + d) for d in ((1e-7, 0), (-1e-7, 0), (0, 1e-7), (0, -1e-7))]
                    assert not all(point_in_union(y, sc, 0.0) for y in shrunk), (vg.nodes[i], vg.nodes[j])


def test_baseline_disconnected():
    box = static(ConvexPolygon(((-0.1, -0.1), (0.1, -0.1), (0.1, 0.1), (-0.1, 0.1))), 0.3, 0.5)
    sc = Scenario(1.0, 100.0, 0.03, (0.3, 0.5), (1.0, 0.5), (box,))
    assert baseline_lower_bound(sc) == (math.inf, [])


def test_baseline_static_disc_is_lower_bound():
    sc = Scenario(1.0, 100.0, 0.03, (0.0, 0.5), (1.0, 0.5), (static(Disc(0.25), 0.5, 0.5),))
    cost, _ = baseline_lower_bound(sc)
    exact = (2 * math.sqrt(0.25 - 0.0625) + 0.25 * (math.pi - 2 * math.acos(0.5))) / 0.03
    assert 1 / 0.03 < cost <= exact
    assert cost == pytest.approx(exact, rel=1e-2)


def test_dynamic_obstacles_ignored(exp3):
    assert baseline_lower_bound(exp3)[0] == baseline_lower_bound(
        Scenario(1.0, 100.0, 0.03, (0.0, 0.5), (1.0, 0.5), presets.exp3_bars()))[0]


# ---------------------------------------------------------------- validation

def test_validate_straight_line():
    assert validate_trajectory(EMPTY, RobotTrajectory([(0.0, 0.0, 0.5), (1 / 0.03, 1.0, 0.5)]))


def test_validate_speeding():
    assert not validate_trajectory(EMPTY, RobotTrajectory([(0.0, 0.0, 0.5), (1 / 0.033, 1.0, 0.5)]))


def test_validate_through_disc():
    sc = Scenario(1.0, 100.0, 0.03, (0.0, 0.5), (1.0, 0.5), (static(Disc(0.1), 0.5, 0.5),))
    assert not validate_trajectory(sc, RobotTrajectory([(0.0, 0.0, 0.5), (1 / 0.03, 1.0, 0.5)]))


def test_validate_wrong_endpoints_and_time():
    assert not validate_trajectory(EMPTY, RobotTrajectory([(0.0, 0.0, 0.4), (50.0, 1.0, 0.5)]))
    assert not validate_trajectory(EMPTY, RobotTrajectory([(0.0, 0.0, 0.5), (50.0, 0.9, 0.5)]))
    assert not validate_trajectory(EMPTY, RobotTrajectory([(0.0, 0.0, 0.5), (150.0, 1.0, 0.5)]))
    assert not validate_trajectory(EMPTY, RobotTrajectory([]))


# ---------------------------------------------------------------- SIPP

def test_sipp_empty():
    traj = sipp_plan(EMPTY)
    assert 1 / 0.03 <= traj.total_cost <= 1.25 / 0.03
    assert validate_trajectory(EMPTY, traj)


def test_sipp_exp2_above_lower_bound(exp2):
    traj = sipp_plan(exp2)
    assert traj is not None and validate_trajectory(exp2, traj)
    g = build_graph(exp2, 10, 10)
    assert solve(g, compute_reachable_intervals(g, exp2)).cost <= traj.total_cost
    assert traj.total_cost >= baseline_lower_bound(exp2)[0]


def test_sipp_goal_cell_unsafe():
    sc = Scenario(1.0, 100.0, 0.03, (0.0, 0.5), (1.0, 0.5), (static(Disc(0.1), 0.95, 0.5),))
    assert sipp_plan(sc) is None


def test_sipp_rejects_tiny_grid():
    with pytest.raises(ValueError):
        sipp_plan(EMPTY, grid_n=1)


def test_sipp_csv(exp2):
    rows = sipp_plan(exp2).to_csv().splitlines()
    assert rows[0] == "t,x,y"
    assert rows[1] == "0.0,0.0,0.5"


# ---------------------------------------------------------------- RRT

def test_rrt_empty():
    traj = rrt_plan(EMPTY, seed=0)
    assert traj is not None and traj.total_cost >= 1 / 0.03 - 1e-9
    assert validate_trajectory(EMPTY, traj)


def test_rrt_deterministic(exp2):
    assert rrt_plan(exp2, 3).samples == rrt_plan(exp2, 3).samples


def test_rrt_budget_exhausted():
    sc = Scenario(1.0, 100.0, 0.03, (0.0, 0.5), (1.0, 0.5), (static(Bar((0.5, 0.0), (0.5, 1.0))),))
    assert rrt_plan(sc, 0, RRTParams(max_iters=50)) is None


def test_rrt_bad_params():
    with pytest.raises(ValueError):
        rrt_plan(EMPTY, 0, RRTParams(step=0.0))


def test_rrt_mostly_above_sipp(exp2):
    sipp = sipp_plan(exp2).total_cost
    costs = [rrt_plan(exp2, seed) for seed in range(20)]
    above = sum(1 for c in costs if c is not None and c.total_cost >= sipp)
    assert above >= 16
