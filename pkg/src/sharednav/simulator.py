"""Point-robot kinematics, collision handling, and trial execution.

The map handed to the simulator is assumed to be pre-inflated by the
robot radius, so a point-in-occupied-cell test is a disk-robot collision
test.  Blocked motion slides along the free axis; continuous contact is
debounced into a single collision event per episode.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .goal_estimator import GoalEstimator, NoFeasibleGoalError
from .gridmap import OccupancyGrid, WorldPoint
from .potential_field import FieldCache
from .pseudo_user import InputCondition, PseudoUser
from .shared_controller import ControlMode, HeldCommand, control_tick


@dataclass
class SimParams:
    s: float = 0.3  # commanded speed, m/s
    dt: float = 0.05  # simulation step, s
    timeout: float = 120.0  # simulated seconds before a trial fails
    goal_radius: float = 0.3  # arrival distance from the goal-cell center, m
    n_window: int = 10  # command-history window is n_window + 1 records
    threshold: float = 0.95  # goal-selection threshold T
    beta: float = 4.0  # confidence gain


@dataclass
class SimState:
    position: WorldPoint
    clock: float = 0.0
    path_length: float = 0.0
    collisions: int = 0
    colliding: bool = False


@dataclass(frozen=True)
class TrialResult:
    success: bool
    reached_goal: bool
    collisions: int
    elapsed: float
    path_length: float
    condition: InputCondition
    seed: int


def step(state: SimState, v: tuple[float, float], dt: float, grid: OccupancyGrid) -> SimState:
    """Advance one time step, blocking and sliding against obstacles."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    p = state.position
    target = WorldPoint(p.x + v[0] * dt, p.y + v[1] * dt)
    if grid.is_free_point(target):
        state.colliding = False
        moved = target
    else:
        if not state.colliding:
            state.collisions += 1
            state.colliding = True
        # slide: try each axis separately
        moved = p
        q = WorldPoint(moved.x + v[0] * dt, moved.y)
        if grid.is_free_point(q):
            moved = q
        q = WorldPoint(moved.x, moved.y + v[1] * dt)
        if grid.is_free_point(q):
            moved = q
    state.path_length += math.hypot(moved.x - p.x, moved.y - p.y)
    state.position = moved
    state.clock += dt
    return state


@dataclass
class TrajectorySample:
    t: float
    x: float
    y: float
    vx: float
    vy: float
    confidence: float


def run_trial(
    grid: OccupancyGrid,
    start: WorldPoint,
    true_goal: tuple[int, int],
    condition: InputCondition,
    seed: int,
    params: SimParams | None = None,
    cache: FieldCache | None = None,
    trajectory: list[TrajectorySample] | None = None,
) -> TrialResult:
    """Run one navigation trial; deterministic given all arguments.

    Success requires reaching the goal without any collision;
    collisions, time, and path length are recorded either way.
    """
    if params is None:
        params = SimParams()
    if cache is None:
        cache = FieldCache(grid)
    if not grid.is_free_point(start):
        raise ValueError(f"start ({start.x}, {start.y}) is not on a free cell")
    if not grid.is_free_cell(true_goal):
        raise ValueError(f"goal cell {true_goal} is occupied")
    goal_field = cache.get(true_goal)
    if not math.isfinite(goal_field.value_at_point(grid, start)):
        raise ValueError(f"goal cell {true_goal} unreachable from start")

    rng = np.random.Generator(np.random.PCG64(seed))
    user = PseudoUser(grid, true_goal, condition, params.s, rng, cache)
    estimator = GoalEstimator(
        grid, params.s, params.n_window, params.threshold, params.beta, cache
    )
    goal_center = grid.cell_to_world(true_goal)
    state = SimState(position=start)
    held = HeldCommand(value=(0.0, 0.0), issued_at=0.0)
    estimate = None
    reached = False

    def at_goal(p: WorldPoint) -> bool:
        return math.hypot(p.x - goal_center.x, p.y - goal_center.y) <= params.goal_radius

    if at_goal(state.position):
        reached = True
    while not reached and state.clock < params.timeout - 1e-9:
        record = user.next_input(state.clock, state.position)
        if record is not None:
            held = HeldCommand(value=record.velocity, issued_at=record.time)
            try:
                estimate = estimator.push(record)
            except NoFeasibleGoalError:
                estimate = None
        v = control_tick(grid, state.position, held, estimate, condition.mode, params.s, cache)
        step(state, v, params.dt, grid)
        if trajectory is not None:
            c = estimate.confidence if estimate is not None and estimate.confidence else 0.0
            trajectory.append(
                TrajectorySample(state.clock, state.position.x, state.position.y, v[0], v[1], c)
            )
        if at_goal(state.position):
            reached = True
    return TrialResult(
        success=reached and state.collisions == 0,
        reached_goal=reached,
        collisions=state.collisions,
        elapsed=state.clock,
        path_length=state.path_length,
        condition=condition,
        seed=seed,
    )
