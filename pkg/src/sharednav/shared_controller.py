"""Confidence-weighted blending of the held user command and autonomy.

The user command is zero-order held between inputs; the autonomous
command is recomputed every tick from the robot's moving position.  The
blend deliberately skips renormalization, so opposing commands slow the
robot down instead of snapping to full speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .autonomy import UnreachableGoalError, autonomous_command
from .goal_estimator import GoalEstimate
from .gridmap import OccupancyGrid, WorldPoint
from .potential_field import FieldCache


class ControlMode(str, Enum):
    SHARED = "shared"
    DIRECT = "direct"


@dataclass
class HeldCommand:
    value: tuple[float, float]
    issued_at: float


def blend(
    v_user: tuple[float, float],
    v_auto: tuple[float, float],
    c: float,
) -> tuple[float, float]:
    """c * v_auto + (1 - c) * v_user, componentwise."""
    if not (0.0 <= c <= 1.0):
        raise ValueError(f"confidence must be in [0, 1], got {c}")
    return (
        c * v_auto[0] + (1.0 - c) * v_user[0],
        c * v_auto[1] + (1.0 - c) * v_user[1],
    )


def control_tick(
    grid: OccupancyGrid,
    x: WorldPoint,
    held: HeldCommand,
    estimate: GoalEstimate | None,
    mode: ControlMode,
    s: float,
    cache: FieldCache | None = None,
) -> tuple[float, float]:
    """One controller tick: pass-through in direct mode, blend in shared.

    Before the first estimate, or when the estimated goal is unreachable,
    shared mode degrades to the held user command for this tick.
    """
    if mode is ControlMode.DIRECT or estimate is None:
        return held.value
    try:
        v_auto = autonomous_command(grid, estimate.goal, x, s, cache)
    except UnreachableGoalError:
        return held.value
    c = estimate.confidence if estimate.confidence is not None else 0.0
    return blend(held.value, v_auto, c)
