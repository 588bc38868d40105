"""Decentralised gradient-based planning for multi-hand assembly.

Sub-goals emerge from a piecewise continuous energy: each hand scores
every component with a contact-gated potential, descends the gradient of
the smallest feasible entry, and re-evaluates every step. The package
bundles the planner, a kinematic simulator, an experiment harness with a
CLI, and a live WebSocket bridge for human-in-the-loop disturbances.
"""

from .energy import (ContactParams, EnergyReport, GoalSpec, contact_prob,
                     goal_loss, hand_energy, hand_energy_gradient,
                     smooth_contact_prob)
from .planner import (HandDecision, PlannerConfig, is_converged, plan_all,
                      plan_step, select_subgoal)
from .poses import EmbeddedPose, InvalidPoseError, Pose, embed, embedded_sq_distance
from .scenario import Scenario, ScenarioError, load_scenario
from .sim import (DisturbanceEvent, EventLog, LossTrace, RunResult,
                  WorldState, init_world, run, step_world)
from .workspace import (BarrierParams, BoxWorkspace, HalfspaceWorkspace,
                        InfeasibleStateError, barrier_cost_and_gradient,
                        inequality_value, project_into)

__version__ = "0.1.0"

__all__ = [
    "BarrierParams", "BoxWorkspace", "ContactParams", "DisturbanceEvent",
    "EmbeddedPose", "EnergyReport", "EventLog", "GoalSpec",
    "HalfspaceWorkspace", "HandDecision", "InfeasibleStateError",
    "InvalidPoseError", "LossTrace", "PlannerConfig", "Pose", "RunResult",
    "Scenario", "ScenarioError", "WorldState", "barrier_cost_and_gradient",
    "contact_prob", "embed", "embedded_sq_distance", "goal_loss",
    "hand_energy", "hand_energy_gradient", "inequality_value", "init_world",
    "is_converged", "load_scenario", "plan_all", "plan_step", "project_into",
    "run", "select_subgoal", "smooth_contact_prob", "step_world",
]
