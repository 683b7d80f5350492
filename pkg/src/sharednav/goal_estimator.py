"""Goal inference from a sliding window of user velocity commands.

Per-step likelihood of a candidate goal g given command v at position x:

    L(g) = exp(-|| v_ideal(x -> g) - v ||)

where v_ideal is the steepest-descent command of magnitude s toward g.
The windowed posterior is the normalized product of per-step likelihoods,
accumulated in log space.  Goal selection keeps the cells above
T * (p_max - p_min) and picks the one nearest the robot; confidence is
beta * p(goal) / sum over the kept cells, clamped to [0, 1].
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .gridmap import OccupancyGrid, WorldPoint
from .potential_field import FieldCache, compute_field, gradient_at


class NoFeasibleGoalError(Exception):
    """Every free cell has zero posterior mass."""


@dataclass(frozen=True)
class CommandRecord:
    time: float
    position: WorldPoint
    velocity: tuple[float, float]


class CommandHistory:
    """Sliding window of the last N+1 command records."""

    def __init__(self, n: int):
        if n < 0:
            raise ValueError(f"window parameter N must be >= 0, got {n}")
        self.n = n
        self._window: deque[CommandRecord] = deque(maxlen=n + 1)

    def push(self, record: CommandRecord) -> None:
        if self._window and record.time <= self._window[-1].time:
            raise ValueError(
                f"record times must be strictly increasing "
                f"({record.time} after {self._window[-1].time})"
            )
        self._window.append(record)

    def clear(self) -> None:
        self._window.clear()

    def records(self) -> tuple[CommandRecord, ...]:
        return tuple(self._window)

    def __len__(self) -> int:
        return len(self._window)


@dataclass(frozen=True)
class GoalPosterior:
    probabilities: np.ndarray  # float64 (height, width), zero outside support
    support: np.ndarray  # bool (height, width), the free-cell set

    def prob_at(self, c: tuple[int, int]) -> float:
        return float(self.probabilities[c[1], c[0]])


@dataclass(frozen=True)
class GoalEstimate:
    candidates: tuple[tuple[int, int], ...]  # row-major order
    goal: tuple[int, int]
    p_max: float
    p_min: float
    confidence: float | None = None


def _log_likelihood_grid(
    grid: OccupancyGrid,
    x: WorldPoint,
    v_user: tuple[float, float],
    s: float,
    cache: FieldCache | None = None,
    delta: float | None = None,
) -> np.ndarray:
    """Log of the per-cell step likelihood, -inf on occupied/unreachable cells.

    Uses the source/goal symmetry of the potential field: the gradient at x
    of the field sourced at g, for every g at once, is read from the fields
    sourced at the four sample points around x (plus the field at x itself
    for the uphill substitution), instead of one field per goal.
    """
    if delta is None:
        delta = grid.resolution
    c = grid.world_to_cell(x)
    if c is None or not grid.is_free_cell(c):
        raise ValueError(f"position ({x.x}, {x.y}) is not on a free cell")
    if cache is None:
        cache = FieldCache(grid)

    center = cache.get(c).values  # phi(x, g) for all g, by symmetry

    def sample_values(px: float, py: float) -> np.ndarray:
        cc = grid.world_to_cell(WorldPoint(px, py))
        if cc is None or not grid.is_free_cell(cc):
            return center + delta
        vals = cache.get(cc).values
        # unreachable samples fall back to uphill from the center value
        return np.where(np.isfinite(vals), vals, center + delta)

    with np.errstate(invalid="ignore", divide="ignore"):
        gx = (sample_values(x.x + delta, x.y) - sample_values(x.x - delta, x.y)) / (2.0 * delta)
        gy = (sample_values(x.x, x.y + delta) - sample_values(x.x, x.y - delta)) / (2.0 * delta)
        norm = np.hypot(gx, gy)
        vx = np.where(norm > 0, -gx / norm * s, 0.0)
        vy = np.where(norm > 0, -gy / norm * s, 0.0)
    logl = -np.hypot(vx - v_user[0], vy - v_user[1])
    # occupied or unreachable-from-x goals are impossible
    logl = np.where(np.isfinite(center) & ~grid.occupied, logl, -np.inf)
    return logl


def step_likelihood(
    grid: OccupancyGrid,
    x: WorldPoint,
    v_user: tuple[float, float],
    s: float,
    cache: FieldCache | None = None,
) -> np.ndarray:
    """Per-cell likelihood grid, values in (0, 1], zero where infeasible."""
    return np.exp(_log_likelihood_grid(grid, x, v_user, s, cache))


def step_likelihood_bruteforce(
    grid: OccupancyGrid,
    x: WorldPoint,
    v_user: tuple[float, float],
    s: float,
    cache: FieldCache | None = None,
) -> np.ndarray:
    """Oracle: one field per candidate goal, gradient read at x. Slow."""
    c = grid.world_to_cell(x)
    if c is None or not grid.is_free_cell(c):
        raise ValueError(f"position ({x.x}, {x.y}) is not on a free cell")
    out = np.zeros((grid.height, grid.width))
    for gy in range(grid.height):
        for gx_ in range(grid.width):
            if grid.occupied[gy, gx_]:
                continue
            f = cache.get((gx_, gy)) if cache is not None else compute_field(grid, (gx_, gy))
            if not math.isfinite(f.values[c[1], c[0]]):
                continue
            g = gradient_at(f, grid, x)
            norm = math.hypot(g[0], g[1])
            if norm > 0:
                v = (-g[0] / norm * s, -g[1] / norm * s)
            else:
                v = (0.0, 0.0)
            out[gy, gx_] = math.exp(-math.hypot(v[0] - v_user[0], v[1] - v_user[1]))
    return out


def update_posterior(
    grid: OccupancyGrid,
    history: CommandHistory,
    s: float,
    cache: FieldCache | None = None,
    _log_cache: dict[CommandRecord, np.ndarray] | None = None,
) -> GoalPosterior:
    """Normalized product of per-record likelihoods over the window.

    Each factor is evaluated at the position recorded with its command.
    The product is accumulated in log space: sum logs, subtract the max,
    exponentiate, normalize.
    """
    records = history.records()
    if not records:
        raise ValueError("command history is empty")
    if cache is None:
        cache = FieldCache(grid)
    total = None
    for rec in records:
        logl = None if _log_cache is None else _log_cache.get(rec)
        if logl is None:
            logl = _log_likelihood_grid(grid, rec.position, rec.velocity, s, cache)
            if _log_cache is not None:
                _log_cache[rec] = logl
        total = logl if total is None else total + logl
    support = ~grid.occupied
    peak = total.max()
    if not math.isfinite(peak):
        raise NoFeasibleGoalError("no feasible goal: zero likelihood on every free cell")
    with np.errstate(invalid="ignore"):
        probs = np.exp(total - peak)
    probs[~support] = 0.0
    probs[~np.isfinite(probs)] = 0.0
    probs /= probs.sum()
    return GoalPosterior(probabilities=probs, support=support)


def select_goal(
    posterior: GoalPosterior,
    grid: OccupancyGrid,
    x: WorldPoint,
    threshold: float,
) -> GoalEstimate:
    """Keep cells above threshold * (p_max - p_min); pick the nearest to x.

    Ties in distance break toward the lower row-major index.
    """
    if not (0.0 < threshold < 1.0):
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    probs = posterior.probabilities
    sup = posterior.support
    p_max = float(probs[sup].max())
    p_min = float(probs[sup].min())
    cut = threshold * (p_max - p_min)
    keep = sup & (probs > cut)
    ys, xs = np.nonzero(keep)
    candidates = tuple(zip(xs.tolist(), ys.tolist()))  # nonzero is row-major
    best = None
    best_d = math.inf
    for cx, cy in candidates:
        w = grid.cell_to_world((cx, cy))
        d = math.hypot(w.x - x.x, w.y - x.y)
        if d < best_d:
            best_d = d
            best = (cx, cy)
    return GoalEstimate(candidates=candidates, goal=best, p_max=p_max, p_min=p_min)


def confidence(posterior: GoalPosterior, estimate: GoalEstimate, beta: float) -> float:
    """beta * p(goal) / sum over candidates, clamped into [0, 1]."""
    if not estimate.candidates:
        raise ValueError("estimate has no candidate cells")
    mass = sum(posterior.prob_at(c) for c in estimate.candidates)
    if mass <= 0.0:
        return 0.0
    c = beta * posterior.prob_at(estimate.goal) / mass
    return min(1.0, max(0.0, c))


class GoalEstimator:
    """Stateful wrapper tying history, posterior, selection and confidence.

    One instance per trial/session; pushing a record re-estimates.  The
    history is not cleared on goal changes, only on reset().
    """

    def __init__(
        self,
        grid: OccupancyGrid,
        s: float,
        n_window: int = 10,
        threshold: float = 0.95,
        beta: float = 4.0,
        cache: FieldCache | None = None,
    ):
        self.grid = grid
        self.s = s
        self.threshold = threshold
        self.beta = beta
        self.history = CommandHistory(n_window)
        self.cache = cache if cache is not None else FieldCache(grid)
        self._log_cache: dict[CommandRecord, np.ndarray] = {}
        self.posterior: GoalPosterior | None = None
        self.estimate: GoalEstimate | None = None

    def reset(self) -> None:
        self.history.clear()
        self._log_cache.clear()
        self.posterior = None
        self.estimate = None

    def push(self, record: CommandRecord) -> GoalEstimate:
        self.history.push(record)
        # drop cached factors for evicted records
        live = set(self.history.records())
        for rec in list(self._log_cache):
            if rec not in live:
                del self._log_cache[rec]
        self.posterior = update_posterior(
            self.grid, self.history, self.s, self.cache, self._log_cache
        )
        est = select_goal(self.posterior, self.grid, record.position, self.threshold)
        c = confidence(self.posterior, est, self.beta)
        self.estimate = GoalEstimate(
            candidates=est.candidates, goal=est.goal, p_max=est.p_max, p_min=est.p_min, confidence=c
        )
        return self.estimate
