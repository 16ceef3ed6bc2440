"""Two-period oil-spill response planning: sector Markov trajectories, a
rule-based decision backbone and a Bellman solver over it."""

from .backbone import DecisionBackbone, build_backbone, render_backbone
from .kernels import BACKEND
from .scenario import Scenario, ScenarioError, load_demo, load_scenario, parse_scenario, validate
from .solver import (
    Policy,
    SolveResult,
    backward_induct,
    brute_force,
    evaluate_plan,
    stage_return_table,
    value_of_surveillance,
)
from .trajectory import build_transitions, run_trajectory

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DecisionBackbone",
    "Policy",
    "Scenario",
    "ScenarioError",
    "SolveResult",
    "backward_induct",
    "brute_force",
    "build_backbone",
    "build_transitions",
    "evaluate_plan",
    "load_demo",
    "load_scenario",
    "parse_scenario",
    "render_backbone",
    "run_trajectory",
    "stage_return_table",
    "validate",
    "value_of_surveillance",
]
