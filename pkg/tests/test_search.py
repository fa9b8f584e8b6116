import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpdo_bounds import presets
from mpdo_bounds.discretization import build_graph
from mpdo_bounds.reachability import IntervalTable, compute_reachable_intervals
from mpdo_bounds.scenario import Disc, Obstacle, Scenario, Trajectory
from mpdo_bounds.search import SearchOptions, constrained_neighbors, earliest_reach, solve

from oracles import exhaustive_earliest_arrival, random_table

EMPTY = Scenario(1.0, 100.0, 0.03, (0.0, 0.5), (1.0, 0.5))
ON, OFF = SearchOptions(True), SearchOptions(False)


def lb(sc, n, k, opts=ON, dt=None):
    g = build_graph(sc, n, k)
    return solve(g, compute_reachable_intervals(g, sc, dt), opts)


def check_path(g, table, res):
    steps = res.path
    assert steps[0].vertex == g.s and steps[0].arrival == 0.0
    assert steps[-1].vertex == g.d
    assert res.cost == steps[-1].arrival
    total = 0.0
    for a, b in zip(steps, steps[1:]):
        cost = min(c for u, c, _ in g.neighbors(a.vertex) if u == b.vertex)
        assert a.wait >= 0
        assert b.arrival == pytest.approx(a.arrival + a.wait + cost, abs=1e-9)
        total += a.wait + cost
    assert total == pytest.approx(res.cost, abs=1e-9)
    for st_ in steps:
        assert any(lo <= st_.arrival <= hi for lo, hi in table.of_vertex(st_.vertex))


# ---------------------------------------------------------------- earliest_reach

def two_vertex_table(goal_ivs, horizon=10.0):
    return IntervalTable(horizon, 1, 0, [[(0.0, horizon)], goal_ivs])


def test_earliest_reach_unconstrained():
    assert earliest_reach(0, 1, 5.0, 1.0, two_vertex_table([(0.0, 10.0)])) == 6.0


def test_earliest_reach_wait_then_move():
    assert earliest_reach(0, 1, 2.0, 0.5, two_vertex_table([(0.0, 2.0), (3.0, 10.0)])) == 3.0


def test_earliest_reach_absent():
    assert earliest_reach(0, 1, 2.0, 0.5, two_vertex_table([(0.0, 2.0)])) is None


# ---------------------------------------------------------------- solve on simple scenes

@pytest.mark.parametrize("n,k", [(2, 1), (2, 2), (4, 3), (6, 5), (10, 10)])
def test_empty_corridor_even_n(n, k):
    # y = 0.5 is a grid line: every cell crossing loses exactly w/k
    for opts in (ON, OFF):
        assert lb(EMPTY, n, k, opts).cost == pytest.approx((k - 1) / k / 0.03, abs=1e-9)


@pytest.mark.parametrize("n,k", [(1, 1), (1, 3), (3, 4), (5, 5), (7, 2)])
def test_empty_corridor_any_n_is_bounded(n, k):
    for opts in (ON, OFF):
        cost = lb(EMPTY, n, k, opts).cost
        assert (k - 1) / k / 0.03 - 1e-9 <= cost <= 1 / 0.03 + 1e-9


def test_exp1_k10_ratio(exp1):
    ratio_off = lb(exp1, 10, 10, OFF).cost / presets.EXP1_OPTIMUM
    assert ratio_off == pytest.approx(0.9, abs=1e-9)
    ratio_on = lb(exp1, 10, 10, ON).cost / presets.EXP1_OPTIMUM
    assert 0.9 - 1e-9 <= ratio_on <= 1.0


def test_start_permanently_covered_no_path():
    # the start's whole cell stays covered, so every leaving edge ends at T or later
    blocker = Obstacle(Disc(0.3), Trajectory(((0.0, 0.6, 0.6),)))
    sc = Scenario(1.0, 20.0, 0.03, (0.55, 0.55), (0.05, 0.95), (blocker,))
    res = lb(sc, 4, 2)
    assert res.status == "no_path" and res.cost == math.inf and not res.solved


def test_no_reachable_boundary_no_path():
    sc = Scenario(1.0, 20.0, 0.03, (0.3, 0.3), (0.9, 0.9))
    g = build_graph(sc, 3, 2)
    ivs = [[] for _ in range(g.n_line_segments)] + [[(0.0, 20.0)], [(0.0, 20.0)]]
    assert solve(g, IntervalTable.for_graph(g, ivs, 20.0)).status == "no_path"


def test_horizon_too_short_no_path():
    sc = Scenario(1.0, 10.0, 0.03, (0.0, 0.5), (1.0, 0.5))
    assert lb(sc, 4, 2).status == "no_path"


# ---------------------------------------------------------------- reconstruction

def test_single_direct_edge_path():
    sc = Scenario(1.0, 10.0, 1.0, (0.2, 0.5), (0.8, 0.5))
    g = build_graph(sc, 1, 1)
    ivs = [[] for _ in range(g.n_line_segments)] + [[(0.0, 10.0)], [(0.0, 10.0)]]
    table = IntervalTable.for_graph(g, ivs, 10.0)
    res = solve(g, table)
    assert [s.vertex for s in res.path] == [g.s, g.d]
    assert res.path[0].wait == 0.0
    assert res.cost == pytest.approx(0.6)


def test_wait_recorded_at_vertex():
    # s -> shared side (cost 2) -> d (cost 0.5) with the goal blocked on (2, 3)
    sc = Scenario(1.0, 10.0, 0.125, (0.25, 0.25), (0.5625, 0.25))
    g = build_graph(sc, 2, 1)
    shared = g.n_horizontal + 1  # x = 0.5, first row
    ivs = [[] for _ in range(g.n_line_segments)] + [[(0.0, 10.0)], [(0.0, 2.0), (3.0, 10.0)]]
    ivs[shared] = [(0.0, 10.0)]
    table = IntervalTable.for_graph(g, ivs, 10.0)
    res = solve(g, table, OFF)
    assert [s.vertex for s in res.path] == [g.s, shared, g.d]
    assert [s.arrival for s in res.path] == [0.0, 2.0, 3.0]
    assert res.path[1].wait == pytest.approx(0.5)
    check_path(g, table, res)


@pytest.mark.parametrize("name", ["exp1", "exp2", "exp3"])
def test_path_invariants_on_presets(name):
    sc = presets.make_preset(name)
    g = build_graph(sc, 6, 3)
    table = compute_reachable_intervals(g, sc)
    for opts in (ON, OFF):
        res = solve(g, table, opts)
        assert res.solved
        check_path(g, table, res)


# ---------------------------------------------------------------- expansion constraint

def test_constrained_neighbors_filters_parent_cell():
    g = build_graph(EMPTY, 3, 2)
    v = int(g.cell_vertices[4, 0])
    full = g.neighbors(v)
    got = constrained_neighbors(g, v, 4, ON)
    assert got and all(c != 4 for _, _, c in got)
    assert len(got) == len(full) - 3 * 2
    assert constrained_neighbors(g, v, 4, OFF) == full
    assert constrained_neighbors(g, v, None, ON) == full


def test_constraint_not_applied_at_start():
    g = build_graph(EMPTY, 3, 2)
    assert constrained_neighbors(g, g.s, g.start_cells[0], ON) == g.neighbors(g.s)


def test_only_zero_heuristic():
    with pytest.raises(ValueError):
        SearchOptions(heuristic="euclidean")


@pytest.mark.parametrize("name", ["exp1", "exp2", "exp3"])
def test_constraint_on_not_below_off(name):
    sc = presets.make_preset(name)
    assert lb(sc, 8, 4, ON).cost >= lb(sc, 8, 4, OFF).cost - 1e-9


# ---------------------------------------------------------------- optimality and determinism

@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 2))
def test_matches_exhaustive_oracle(seed, n, k):
    rng = random.Random(seed)
    sc = Scenario(1.0, 10.0, 0.5, (rng.uniform(0, 1), rng.uniform(0, 1)), (rng.uniform(0, 1), rng.uniform(0, 1)))
    g = build_graph(sc, n, k)
    table = random_table(g, rng, 10.0)
    res = solve(g, table, OFF)
    want = exhaustive_earliest_arrival(g, table.of_vertex, 10.0)
    assert res.cost == want
    if res.solved:
        check_path(g, table, res)
    on = solve(g, table, ON)
    assert on.cost >= res.cost


def test_deterministic(exp3):
    g = build_graph(exp3, 8, 4)
    table = compute_reachable_intervals(g, exp3)
    a, b = solve(g, table), solve(g, table)
    assert a.cost == b.cost
    assert a.path == b.path
    assert a.stats["expansions"] == b.stats["expansions"]
    assert a.stats["generated"] == b.stats["generated"]
