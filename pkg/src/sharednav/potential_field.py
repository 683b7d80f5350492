"""Travel-cost potential fields on occupancy grids.

A field holds, per cell, the length in meters of the shortest
obstacle-avoiding 8-connected path to one goal cell (cardinal step =
resolution, diagonal = resolution * sqrt(2), no corner cutting).
Unreachable and occupied cells carry +inf.

Distances are tracked as integer (cardinal, diagonal) step counts and
materialized as ``(n_card + n_diag * sqrt(2)) * resolution``.  Reversing
a path preserves the step counts, so d(a, b) == d(b, a) bit for bit --
the goal estimator's fast likelihood path relies on that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappush, heappop

import numpy as np

from .gridmap import OccupancyGrid, WorldPoint

SQRT2 = math.sqrt(2.0)


class ZeroGradientError(Exception):
    """No descent direction at this point (at the goal or on a plateau)."""


@dataclass(frozen=True)
class PotentialField:
    goal: tuple[int, int]
    values: np.ndarray  # float64, shape (height, width), +inf where unreachable

    def value_at_cell(self, c: tuple[int, int]) -> float:
        return float(self.values[c[1], c[0]])

    def value_at_point(self, grid: OccupancyGrid, p: WorldPoint) -> float:
        c = grid.world_to_cell(p)
        if c is None:
            return math.inf
        return float(self.values[c[1], c[0]])


def _neighbor_table(grid: OccupancyGrid):
    """Per-cell adjacency (flat indices) with corner cutting excluded.

    Built once per grid and memoized on the grid's scratch dict; the
    structure is read-only afterwards.
    """
    cached = grid._scratch.get("nbrs")
    if cached is not None:
        return cached
    w, h = grid.width, grid.height
    occ = grid.occupied
    nbrs: list[tuple[tuple[int, bool], ...]] = []
    for y in range(h):
        for x in range(w):
            if occ[y, x]:
                nbrs.append(())
                continue
            out = []
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dx == 0 and dy == 0:
                        continue
                    nx, ny = x + dx, y + dy
                    if not (0 <= nx < w and 0 <= ny < h) or occ[ny, nx]:
                        continue
                    diag = dx != 0 and dy != 0
                    if diag and (occ[y, nx] or occ[ny, x]):
                        continue  # both touched cardinals must be free
                    out.append((ny * w + nx, diag))
            nbrs.append(tuple(out))
    table = tuple(nbrs)
    grid._scratch["nbrs"] = table
    return table


def compute_field(grid: OccupancyGrid, goal: tuple[int, int]) -> PotentialField:
    """Exact 8-connected shortest-path distances to `goal`, in meters."""
    gx, gy = goal
    if not (0 <= gx < grid.width and 0 <= gy < grid.height):
        raise ValueError(f"goal cell {goal} out of bounds")
    if grid.occupied[gy, gx]:
        raise ValueError(f"goal cell {goal} is occupied")

    w = grid.width
    n = w * grid.height
    nbrs = _neighbor_table(grid)
    res = grid.resolution

    n_card = np.full(n, -1, dtype=np.int32)
    n_diag = np.full(n, -1, dtype=np.int32)
    start = gy * w + gx
    # heap entries: (float key, cardinal count, diagonal count, cell)
    heap = [(0.0, 0, 0, start)]
    settled = np.zeros(n, dtype=bool)
    best = {start: (0, 0)}
    while heap:
        _, ca, di, u = heappop(heap)
        if settled[u]:
            continue
        settled[u] = True
        n_card[u] = ca
        n_diag[u] = di
        for v, diag in nbrs[u]:
            if settled[v]:
                continue
            nca, ndi = (ca, di + 1) if diag else (ca + 1, di)
            key = nca + ndi * SQRT2
            prev = best.get(v)
            if prev is None or key < prev[0] + prev[1] * SQRT2:
                best[v] = (nca, ndi)
                heappush(heap, (key, nca, ndi, v))

    values = np.full(n, np.inf)
    reached = n_card >= 0
    values[reached] = (n_card[reached] + n_diag[reached] * SQRT2) * res
    values = values.reshape(grid.height, grid.width)
    values.setflags(write=False)
    return PotentialField(goal=(gx, gy), values=values)


class FieldCache:
    """Memoizes potential fields per goal cell for one grid.

    Fields are deterministic pure functions of (grid, goal), so sharing a
    cache across trials cannot change results.
    """

    def __init__(self, grid: OccupancyGrid):
        self.grid = grid
        self._fields: dict[tuple[int, int], PotentialField] = {}

    def get(self, goal: tuple[int, int]) -> PotentialField:
        f = self._fields.get(goal)
        if f is None:
            f = compute_field(self.grid, goal)
            self._fields[goal] = f
        return f


def gradient_at(
    field: PotentialField,
    grid: OccupancyGrid,
    x: WorldPoint,
    delta: float | None = None,
) -> np.ndarray:
    """Central-difference slope of the field at world point x.

    Samples falling on occupied, out-of-bounds, or unreachable cells are
    replaced by value(x) + delta so the slope always points back into
    reachable free space.
    """
    if delta is None:
        delta = grid.resolution
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    c = grid.world_to_cell(x)
    if c is None:
        raise ValueError(f"point ({x.x}, {x.y}) out of bounds")
    if not grid.is_free_cell(c):
        raise ValueError(f"point ({x.x}, {x.y}) is inside an occupied cell")
    center = field.values[c[1], c[0]]

    def sample(px: float, py: float) -> float:
        cc = grid.world_to_cell(WorldPoint(px, py))
        if cc is None or not grid.is_free_cell(cc):
            return center + delta
        v = field.values[cc[1], cc[0]]
        if not math.isfinite(v):
            return center + delta
        return v

    gx = (sample(x.x + delta, x.y) - sample(x.x - delta, x.y)) / (2.0 * delta)
    gy = (sample(x.x, x.y + delta) - sample(x.x, x.y - delta)) / (2.0 * delta)
    return np.array([gx, gy])


def desired_velocity(
    field: PotentialField,
    grid: OccupancyGrid,
    x: WorldPoint,
    s: float,
    delta: float | None = None,
) -> tuple[float, float]:
    """Steepest-descent velocity of magnitude exactly s.

    Raises ZeroGradientError at the goal or on a flat spot; callers that
    want a command there should emit (0, 0) themselves.
    """
    g = gradient_at(field, grid, x, delta)
    norm = math.hypot(g[0], g[1])
    if norm == 0.0:
        raise ZeroGradientError(f"no descent direction at ({x.x}, {x.y})")
    return (-g[0] / norm * s, -g[1] / norm * s)


def field_to_csv(field: PotentialField) -> str:
    """Row-major CSV dump, `inf` for unreachable cells (debug aid)."""
    lines = []
    for row in field.values:
        lines.append(",".join("inf" if not math.isfinite(v) else f"{v:.9g}" for v in row))
    return "\n".join(lines) + "\n"
