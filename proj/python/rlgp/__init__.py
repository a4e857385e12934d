"""Reachability-guided task and motion planning."""

from ._rlgp import (
    Error,
    PlanResult,
    ReachabilityGraph,
    Scenario,
    check_scenario_feasible,
    compute_metrics,
    construct_graph,
    forward_kinematics,
    generate_scenario,
    plan,
    run_batch,
    shortest_path,
    unreachable_from_near_side,
)

__all__ = [
    "Error",
    "PlanResult",
    "ReachabilityGraph",
    "Scenario",
    "check_scenario_feasible",
    "compute_metrics",
    "construct_graph",
    "forward_kinematics",
    "generate_scenario",
    "plan",
    "run_batch",
    "shortest_path",
    "unreachable_from_near_side",
]
