"""Lower bounds for minimum-time point-robot planning among moving obstacles."""
from .baselines import baseline_lower_bound, rrt_plan, sipp_plan, validate_trajectory
from .discretization import LbpGraph, build_graph
from .reachability import IntervalTable, compute_reachable_intervals
from .report import BoundReport, build_report, gap
from .scenario import (Bar, ConvexPolygon, Disc, Obstacle, RobotTrajectory, Scenario, Trajectory,
                       load_scenario, load_scenario_file)
from .search import SearchOptions, solve

__version__ = "0.1.0"

__all__ = [
    "Bar", "BoundReport", "ConvexPolygon", "Disc", "IntervalTable", "LbpGraph", "Obstacle",
    "RobotTrajectory", "Scenario", "SearchOptions", "Trajectory", "baseline_lower_bound", "build_graph",
    "build_report", "compute_reachable_intervals", "gap", "load_scenario", "load_scenario_file",
    "rrt_plan", "sipp_plan", "solve", "validate_trajectory",
]
