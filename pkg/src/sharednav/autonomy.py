"""Autonomous command generation toward the currently estimated goal.

Constant-speed steepest descent on the goal's potential field stands in
for a full navigation stack: on a static map it converges to the same
routes, and it is deterministic.
"""

from __future__ import annotations

import math

from .gridmap import OccupancyGrid, WorldPoint
from .potential_field import FieldCache, ZeroGradientError, desired_velocity


class UnreachableGoalError(Exception):
    """The estimated goal has no free path from the robot's position."""


def autonomous_command(
    grid: OccupancyGrid,
    goal: tuple[int, int],
    x: WorldPoint,
    s: float,
    cache: FieldCache | None = None,
) -> tuple[float, float]:
    """Velocity of magnitude s descending the potential toward `goal`.

    Returns (0, 0) at the goal.  Raises UnreachableGoalError when no free
    path exists; the caller falls back to the raw user command there.
    """
    if cache is None:
        cache = FieldCache(grid)
    field = cache.get(goal)
    if not math.isfinite(field.value_at_point(grid, x)):
        raise UnreachableGoalError(f"goal {goal} unreachable from ({x.x}, {x.y})")
    try:
        return desired_velocity(field, grid, x, s)
    except ZeroGradientError:
        return (0.0, 0.0)
