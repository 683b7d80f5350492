"""Scripted operator and the input-constraint pipeline.

Ideal commands follow the potential descent toward the trial's true
goal; they are then quantized to the condition's direction set and
corrupted with probability 1 - accuracy.  The same quantize/corrupt
pipeline constrains live human input in the teleop service.

Randomness comes from a numpy PCG64 generator; `corrupt` consumes
exactly two draws (Bernoulli, then direction index) per call so that
seeded sequences stay reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .goal_estimator import CommandRecord
from .gridmap import OccupancyGrid, WorldPoint
from .potential_field import FieldCache, ZeroGradientError, desired_velocity
from .shared_controller import ControlMode


class Directions(str, Enum):
    ALL = "all"
    EIGHT = "eight"
    FOUR = "four"


# unit vectors in index order; ties in quantization break toward lower index
FOUR_DIRECTIONS = tuple(
    (math.cos(math.radians(a)), math.sin(math.radians(a))) for a in (0, 90, 180, 270)
)
EIGHT_DIRECTIONS = tuple(
    (math.cos(math.radians(a)), math.sin(math.radians(a))) for a in range(0, 360, 45)
)


def direction_set(directions: Directions) -> tuple[tuple[float, float], ...]:
    if directions is Directions.FOUR:
        return FOUR_DIRECTIONS
    if directions is Directions.EIGHT:
        return EIGHT_DIRECTIONS
    raise ValueError(f"no discrete direction set for {directions}")


@dataclass(frozen=True)
class InputCondition:
    directions: Directions
    accuracy: float = 1.0
    period: float = 1.0
    mode: ControlMode = ControlMode.SHARED

    def __post_init__(self):
        if not (0.0 <= self.accuracy <= 1.0):
            raise ValueError(f"accuracy must be in [0, 1], got {self.accuracy}")
        if self.period <= 0:
            raise ValueError(f"period must be positive, got {self.period}")


def ideal_command(
    grid: OccupancyGrid,
    true_goal: tuple[int, int],
    x: WorldPoint,
    s: float,
    cache: FieldCache | None = None,
) -> tuple[float, float]:
    """Steepest-descent command toward the true goal.

    Inside the goal cell the gradient vanishes; head straight for the
    cell center instead, and stop only once exactly there.
    """
    if cache is None:
        cache = FieldCache(grid)
    field = cache.get(true_goal)
    try:
        return desired_velocity(field, grid, x, s)
    except ZeroGradientError:
        if grid.world_to_cell(x) != true_goal:
            return (0.0, 0.0)  # a symmetric saddle away from the goal
        center = grid.cell_to_world(true_goal)
        dx, dy = center.x - x.x, center.y - x.y
        d = math.hypot(dx, dy)
        if d == 0.0:
            return (0.0, 0.0)
        return (dx / d * s, dy / d * s)


def quantize(
    v: tuple[float, float],
    directions: Directions,
    s: float,
) -> tuple[float, float]:
    """Snap v to the nearest allowed direction at magnitude s.

    All-directions input passes through unchanged; zero stays zero.
    """
    if directions is Directions.ALL or (v[0] == 0.0 and v[1] == 0.0):
        return v
    dirs = direction_set(directions)
    angle = math.atan2(v[1], v[0])
    best_i = 0
    best_d = math.inf
    for i, (ux, uy) in enumerate(dirs):
        d = abs(_wrap_angle(angle - math.atan2(uy, ux)))
        if d < best_d - 1e-12:  # strict improvement; ties keep the lower index
            best_d = d
            best_i = i
    ux, uy = dirs[best_i]
    return (ux * s, uy * s)


def _wrap_angle(a: float) -> float:
    while a > math.pi:
        a -= 2.0 * math.pi
    while a <= -math.pi:
        a += 2.0 * math.pi
    return a


def corrupt(
    v_q: tuple[float, float],
    condition: InputCondition,
    rng: np.random.Generator,
    s: float,
) -> tuple[float, float]:
    """With probability accuracy return v_q, else a uniformly drawn wrong
    direction at magnitude s.  Always consumes two rng draws."""
    if condition.directions is Directions.ALL:
        raise ValueError("all-directions input is never corrupted")
    dirs = direction_set(condition.directions)
    # recover the index of v_q in the direction set
    idx = None
    for i, (ux, uy) in enumerate(dirs):
        if math.isclose(ux * s, v_q[0], abs_tol=1e-9) and math.isclose(uy * s, v_q[1], abs_tol=1e-9):
            idx = i
            break
    if idx is None:
        raise ValueError(f"command {v_q} is not in the {condition.directions.value} direction set")
    u = rng.random()
    j = int(rng.integers(0, len(dirs) - 1))
    if u < condition.accuracy:
        return v_q
    others = [d for i, d in enumerate(dirs) if i != idx]
    ux, uy = others[j]
    return (ux * s, uy * s)


class PseudoUser:
    """Emits one constrained command per period boundary (1 Hz default)."""

    def __init__(
        self,
        grid: OccupancyGrid,
        true_goal: tuple[int, int],
        condition: InputCondition,
        s: float,
        rng: np.random.Generator,
        cache: FieldCache | None = None,
    ):
        self.grid = grid
        self.true_goal = true_goal
        self.condition = condition
        self.s = s
        self.rng = rng
        self.cache = cache if cache is not None else FieldCache(grid)
        self._next_due = 0.0

    def next_input(self, clock: float, x: WorldPoint) -> CommandRecord | None:
        if clock + 1e-9 < self._next_due:
            return None
        while self._next_due <= clock + 1e-9:
            self._next_due += self.condition.period
        v = ideal_command(self.grid, self.true_goal, x, self.s, self.cache)
        v = quantize(v, self.condition.directions, self.s)
        if self.condition.directions is not Directions.ALL and not (v[0] == 0.0 and v[1] == 0.0):
            v = corrupt(v, self.condition, self.rng, self.s)
        return CommandRecord(time=clock, position=x, velocity=v)
