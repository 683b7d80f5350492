"""2-D occupancy grid maps: loading, inflation, world/cell conversion.

Two on-disk formats are supported:

* ASCII: first line ``W H RES OX OY``, then H rows of W characters,
  ``.`` free / ``#`` occupied.  Row 0 is the minimum-y row.
* P5 raster: binary grayscale PGM, one byte per cell, values >= 250
  are free.  Row 0 of the image is the minimum-y row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FREE_THRESHOLD = 250  # grayscale value at or above which a raster cell is free


class MapLoadError(Exception):
    """Raised when a map file cannot be parsed."""


@dataclass(frozen=True)
class WorldPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite world point ({self.x}, {self.y})")


@dataclass(frozen=True)
class OccupancyGrid:
    """Static map. ``occupied[y, x]`` is True for blocked cells.

    Immutable after construction; safe to share between readers.
    """

    width: int
    height: int
    resolution: float
    origin_x: float
    origin_y: float
    occupied: np.ndarray  # bool, shape (height, width)
    _scratch: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.width < 3 or self.height < 3:
            raise ValueError(f"grid must be at least 3x3, got {self.width}x{self.height}")
        if self.resolution <= 0:
            raise ValueError(f"resolution must be positive, got {self.resolution}")
        if self.occupied.shape != (self.height, self.width):
            raise ValueError("occupancy array shape does not match dimensions")
        self.occupied.setflags(write=False)

    # -- coordinate conversion ------------------------------------------

    def world_to_cell(self, p: WorldPoint) -> tuple[int, int] | None:
        """Cell (cx, cy) containing p, or None when out of bounds."""
        cx = math.floor((p.x - self.origin_x) / self.resolution)
        cy = math.floor((p.y - self.origin_y) / self.resolution)
        if 0 <= cx < self.width and 0 <= cy < self.height:
            return cx, cy
        return None

    def cell_to_world(self, c: tuple[int, int]) -> WorldPoint:
        """Center of cell c."""
        cx, cy = c
        if not (0 <= cx < self.width and 0 <= cy < self.height):
            raise ValueError(f"cell {c} out of bounds")
        return WorldPoint(
            self.origin_x + (cx + 0.5) * self.resolution,
            self.origin_y + (cy + 0.5) * self.resolution,
        )

    def is_free_cell(self, c: tuple[int, int]) -> bool:
        cx, cy = c
        return bool(not self.occupied[cy, cx])

    def is_free_point(self, p: WorldPoint) -> bool:
        """True when p falls inside the map on a free cell."""
        c = self.world_to_cell(p)
        return c is not None and self.is_free_cell(c)

    @property
    def free_count(self) -> int:
        return int((~self.occupied).sum())

    # -- serialization ---------------------------------------------------

    def to_ascii(self) -> str:
        lines = [f"{self.width} {self.height} {self.resolution:g} {self.origin_x:g} {self.origin_y:g}"]
        for y in range(self.height):
            lines.append("".join("#" if self.occupied[y, x] else "." for x in range(self.width)))
        return "\n".join(lines) + "\n"


def load_map(path: str) -> OccupancyGrid:
    """Load a map from an ASCII or P5 raster file."""
    try:
        with open(path, "rb") as f:
            head = f.read(2)
        if head == b"P5":
            return _load_p5(path)
        return _load_ascii(path)
    except OSError as e:
        raise MapLoadError(f"{path}: {e.strerror or e}") from None


def _load_ascii(path: str) -> OccupancyGrid:
    with open(path, "r") as f:
        lines = f.read().splitlines()
    if not lines:
        raise MapLoadError(f"{path}: empty file")
    parts = lines[0].split()
    if len(parts) != 5:
        raise MapLoadError(f"{path}:1: header must be 'W H RES OX OY', got {lines[0]!r}")
    try:
        w, h = int(parts[0]), int(parts[1])
        res, ox, oy = float(parts[2]), float(parts[3]), float(parts[4])
    except ValueError as e:
        raise MapLoadError(f"{path}:1: bad header value: {e}") from None
    if w <= 0 or h <= 0:
        raise MapLoadError(f"{path}:1: zero or negative dimensions {w}x{h}")
    rows = lines[1:]
    if len(rows) < h:
        raise MapLoadError(f"{path}: expected {h} grid rows, found {len(rows)}")
    occ = np.zeros((h, w), dtype=bool)
    for y in range(h):
        row = rows[y]
        if len(row) != w:
            raise MapLoadError(f"{path}:{y + 2}: row has {len(row)} characters, expected {w}")
        for x, ch in enumerate(row):
            if ch == ".":
                continue
            # anything that is not explicitly free is treated as occupied
            occ[y, x] = True
    return OccupancyGrid(w, h, res, ox, oy, occ)


def _load_p5(path: str, resolution: float = 0.05, origin: tuple[float, float] = (0.0, 0.0)) -> OccupancyGrid:
    with open(path, "rb") as f:
        data = f.read()
    # P5 header: magic, whitespace/comments, width, height, maxval, single whitespace
    tokens = []
    i = 2
    while len(tokens) < 3:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i < len(data) and data[i : i + 1] == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
            continue
        start = i
        while i < len(data) and not data[i : i + 1].isspace():
            i += 1
        if start == i:
            raise MapLoadError(f"{path}: truncated P5 header at byte {i}")
        tokens.append(data[start:i])
    i += 1  # the single whitespace after maxval
    try:
        w, h, maxval = (int(t) for t in tokens)
    except ValueError:
        raise MapLoadError(f"{path}: non-numeric P5 header fields {tokens}") from None
    if w <= 0 or h <= 0:
        raise MapLoadError(f"{path}: zero dimensions {w}x{h}")
    if maxval > 255:
        raise MapLoadError(f"{path}: 16-bit P5 not supported (maxval {maxval})")
    pixels = data[i : i + w * h]
    if len(pixels) != w * h:
        raise MapLoadError(f"{path}: expected {w * h} pixel bytes, found {len(pixels)} (at byte {i})")
    gray = np.frombuffer(pixels, dtype=np.uint8).reshape(h, w)
    occ = gray < FREE_THRESHOLD
    return OccupancyGrid(w, h, resolution, origin[0], origin[1], occ.copy())


def inflate(grid: OccupancyGrid, radius: float) -> OccupancyGrid:
    """Grow obstacles by `radius` meters (cell-center to cell-center distance).

    Makes a point robot on the inflated map equivalent to a disk robot of
    the same radius on the original one.
    """
    if radius < 0:
        raise ValueError(f"inflation radius must be >= 0, got {radius}")
    r_cells = radius / grid.resolution
    if r_cells == 0 or not grid.occupied.any():
        return grid
    rmax = int(math.floor(r_cells))
    occ = grid.occupied.copy()
    src = grid.occupied
    for dy in range(-rmax, rmax + 1):
        for dx in range(-rmax, rmax + 1):
            if dx == 0 and dy == 0:
                continue
            if dx * dx + dy * dy > r_cells * r_cells:
                continue
            shifted = np.zeros_like(src)
            ys = slice(max(0, dy), min(grid.height, grid.height + dy))
            yd = slice(max(0, -dy), min(grid.height, grid.height - dy))
            xs = slice(max(0, dx), min(grid.width, grid.width + dx))
            xd = slice(max(0, -dx), min(grid.width, grid.width - dx))
            shifted[yd, xd] = src[ys, xs]
            occ |= shifted
    return OccupancyGrid(grid.width, grid.height, grid.resolution, grid.origin_x, grid.origin_y, occ)
