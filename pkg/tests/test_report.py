import math

import pytest

from mpdo_bounds import presets, report
from mpdo_bounds.report import BoundReport, InvariantViolation, LowerBound, UpperBound, build_report, gap
from mpdo_bounds.scenario import RobotTrajectory


def test_gap_examples():
    assert round(100 * gap(38.85, 35.93), 1) == 8.1
    assert round(100 * gap(38.85, 1 / 0.03), 1) == 16.5
    assert gap(38.85, 38.85) == 0.0


@pytest.mark.parametrize("upper, lower", [(30.0, 35.0), (10.0, 0.0), (10.0, -1.0), (math.inf, 3.0), (5.0, math.inf)])
def test_gap_undefined(upper, lower):
    assert gap(upper, lower) is None


def test_best_lower_and_sandwich():
    rep = BoundReport("x", lower=[LowerBound("baseline", 33.3), LowerBound("lb_astar", 35.9, 20, 25, 0.25, True)],
                      upper=[UpperBound("sipp", 38.85)])
    assert rep.best_lower() == 35.9
    rep.check_sandwich()
    rep.compute_gaps()
    assert {(g["upper"], g["lower"]) for g in rep.gaps} == {("sipp", "baseline"),
                                                             ("sipp", "lb_astar(n=20,k=25,ec=on)")}
    lb_gap, base_gap = rep.headline()
    assert lb_gap < base_gap
    rep.upper.append(UpperBound("rrt", 35.0, seed=1))
    with pytest.raises(InvariantViolation):
        rep.check_sandwich()


def test_failed_upper_bounds_are_ignored_by_sandwich():
    rep = BoundReport("x", lower=[LowerBound("baseline", 33.3)], upper=[UpperBound("rrt", math.inf, 0, "no_path")])
    rep.check_sandwich()
    rep.compute_gaps()
    assert rep.gaps == []
    assert rep.headline() == (None, None)


def test_build_report_exp2(exp2):
    rep = build_report(exp2, configs=[(5, 5)], constraint_flags=(True, False), rrt_seeds=(0, 1))
    methods = [lb.method for lb in rep.lower]
    assert methods == ["baseline", "lb_astar", "lb_astar"]
    assert [ub.method for ub in rep.upper] == ["sipp", "rrt", "rrt"]
    assert rep.errors == []
    doc = rep.to_dict()
    assert doc["headline"]["gap_sipp_baseline"] is not None
    assert "headline" in rep.to_text()
    assert '"scenario": "exp2"' in rep.to_json()


def test_sub_planner_failure_recorded(exp2):
    rep = build_report(exp2, configs=[(0, 5)], rrt_seeds=())
    assert any("lb_astar" in e for e in rep.errors)
    assert [lb.method for lb in rep.lower] == ["baseline"]


def test_guardrail_fires(monkeypatch, exp2):
    fake = RobotTrajectory([(0.0, 0.0, 0.5), (1.0, 1.0, 0.5)])
    monkeypatch.setattr(report, "sipp_plan", lambda *a, **k: fake)
    monkeypatch.setattr(report, "validate_trajectory", lambda *a, **k: True)
    with pytest.raises(InvariantViolation):
        build_report(exp2, configs=[(4, 2)], rrt_seeds=())
