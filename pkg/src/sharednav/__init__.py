"""Confidence-weighted shared control for grid-map teleoperation."""

from .gridmap import MapLoadError, OccupancyGrid, WorldPoint, inflate, load_map
from .potential_field import (
    FieldCache,
    PotentialField,
    ZeroGradientError,
    compute_field,
    desired_velocity,
    gradient_at,
)
from .goal_estimator import (
    CommandHistory,
    CommandRecord,
    GoalEstimate,
    GoalEstimator,
    GoalPosterior,
    NoFeasibleGoalError,
    confidence,
    select_goal,
    step_likelihood,
    update_posterior,
)
from .autonomy import UnreachableGoalError, autonomous_command
from .shared_controller import ControlMode, HeldCommand, blend, control_tick
from .pseudo_user import Directions, InputCondition, PseudoUser, corrupt, ideal_command, quantize
from .simulator import SimParams, SimState, TrialResult, run_trial, step

__all__ = [
    "MapLoadError", "OccupancyGrid", "WorldPoint", "inflate", "load_map",
    "FieldCache", "PotentialField", "ZeroGradientError", "compute_field",
    "desired_velocity", "gradient_at",
    "CommandHistory", "CommandRecord", "GoalEstimate", "GoalEstimator",
    "GoalPosterior", "NoFeasibleGoalError", "confidence", "select_goal",
    "step_likelihood", "update_posterior",
    "UnreachableGoalError", "autonomous_command",
    "ControlMode", "HeldCommand", "blend", "control_tick",
    "Directions", "InputCondition", "PseudoUser", "corrupt", "ideal_command", "quantize",
    "SimParams", "SimState", "TrialResult", "run_trial", "step",
]
