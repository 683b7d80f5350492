import math

import numpy as np
import pytest

from sharednav.gridmap import OccupancyGrid


def make_grid(rows: list[str], resolution: float = 1.0, origin=(0.0, 0.0)) -> OccupancyGrid:
    """Build a grid from ASCII art rows given top row first (max y first),
    matching how maps read on screen."""
    h = len(rows)
    w = len(rows[0])
    occ = np.zeros((h, w), dtype=bool)
    for i, row in enumerate(rows):
        y = h - 1 - i
        for x, ch in enumerate(row):
            occ[y, x] = ch == "#"
    return OccupancyGrid(w, h, resolution, origin[0], origin[1], occ)


def random_grid(rng: np.random.Generator, max_side: int = 20, p_occ: float = 0.2) -> OccupancyGrid:
    """Random map with at least one free cell."""
    while True:
        w = int(rng.integers(3, max_side + 1))
        h = int(rng.integers(3, max_side + 1))
        occ = rng.random((h, w)) < p_occ
        if not occ.all():
            return OccupancyGrid(w, h, 1.0, 0.0, 0.0, occ)


def _count_less(a1: int, b1: int, a2: int, b2: int) -> bool:
    """Exact comparison a1 + b1*sqrt(2) < a2 + b2*sqrt(2) over integers."""
    da = a1 - a2
    db = b1 - b2
    if da == 0 and db == 0:
        return False
    if da <= 0 and db <= 0:
        return True
    if da >= 0 and db >= 0:
        return False
    if da < 0:  # da < 0 < db: da + db*sqrt2 < 0  <=>  2*db^2 < da^2
        return 2 * db * db < da * da
    # db < 0 < da:  da < -db*sqrt2  <=>  da^2 < 2*db^2
    return da * da < 2 * db * db


def oracle_field_values(grid: OccupancyGrid, goal: tuple[int, int]) -> np.ndarray:
    """Independent shortest-path oracle: exhaustive relaxation over
    (cardinal, diagonal) step counts with exact integer comparisons."""
    w, h = grid.width, grid.height
    occ = grid.occupied
    INF = (1 << 30, 1 << 30)
    dist = {(x, y): INF for y in range(h) for x in range(w) if not occ[y, x]}
    gx, gy = goal
    assert not occ[gy, gx]
    dist[(gx, gy)] = (0, 0)
    changed = True
    while changed:
        changed = False
        for (x, y), (ca, di) in list(dist.items()):
            if (ca, di) == INF:
                continue
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dx == 0 and dy == 0:
                        continue
                    nx, ny = x + dx, y + dy
                    if not (0 <= nx < w and 0 <= ny < h) or occ[ny, nx]:
                        continue
                    diag = dx != 0 and dy != 0
                    if diag and (occ[y, nx] or occ[ny, x]):
                        continue
                    cand = (ca, di + 1) if diag else (ca + 1, di)
                    cur = dist[(nx, ny)]
                    if _count_less(cand[0], cand[1], cur[0], cur[1]):
                        dist[(nx, ny)] = cand
                        changed = True
    out = np.full((h, w), np.inf)
    for (x, y), (ca, di) in dist.items():
        if (ca, di) != INF:
            out[y, x] = (ca + di * math.sqrt(2.0)) * grid.resolution
    return out


@pytest.fixture
def open5() -> OccupancyGrid:
    return make_grid(["....."] * 5)
