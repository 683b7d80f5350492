"""Export of (position, command) -> goal-likelihood training samples.

Routes are traced by potential descent between random free endpoint
pairs; each route step yields one record holding the start position, the
current position, the command, and the full per-cell likelihood grid.

Container layout (little-endian):

    magic   8 bytes  b"SNAVDS1\\0"
    width   uint32
    height  uint32
    count   uint32
    resolution float32
    origin_x   float32
    origin_y   float32
    then `count` records, each:
      x0, y0, xt, yt, vx, vy  float32
      likelihood grid, row-major width*height float32
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .gridmap import OccupancyGrid, WorldPoint
from .goal_estimator import step_likelihood
from .potential_field import FieldCache, ZeroGradientError, desired_velocity

MAGIC = b"SNAVDS1\x00"
_HEADER = struct.Struct("<8sIIIfff")
_RECORD_FIXED = struct.Struct("<ffffff")

ENDPOINT_ATTEMPT_CAP = 10_000  # rejection-sampling attempts per pair


class DatasetError(Exception):
    pass


@dataclass(frozen=True)
class TrainingSample:
    x0: tuple[float, float]
    xt: tuple[float, float]
    vt: tuple[float, float]
    likelihood: np.ndarray  # float32 (height, width)


def sample_endpoints(
    grid: OccupancyGrid,
    min_distance: float,
    count: int,
    rng: np.random.Generator,
) -> list[tuple[WorldPoint, tuple[int, int]]]:
    """Random (start point, goal cell) pairs, both free, farther apart
    than min_distance, goal reachable from start."""
    diag = math.hypot(grid.width * grid.resolution, grid.height * grid.resolution)
    if min_distance >= diag:
        raise DatasetError(f"min_distance {min_distance} exceeds the map diagonal {diag:.3f}")
    free_ys, free_xs = np.nonzero(~grid.occupied)
    if len(free_xs) < 2:
        raise DatasetError("map has fewer than two free cells")
    cache = FieldCache(grid)
    pairs = []
    for _ in range(count):
        for attempt in range(ENDPOINT_ATTEMPT_CAP):
            i = int(rng.integers(0, len(free_xs)))
            j = int(rng.integers(0, len(free_xs)))
            start_cell = (int(free_xs[i]), int(free_ys[i]))
            goal_cell = (int(free_xs[j]), int(free_ys[j]))
            start = grid.cell_to_world(start_cell)
            goal_w = grid.cell_to_world(goal_cell)
            if math.hypot(goal_w.x - start.x, goal_w.y - start.y) <= min_distance:
                continue
            if not math.isfinite(cache.get(goal_cell).value_at_point(grid, start)):
                continue
            pairs.append((start, goal_cell))
            break
        else:
            raise DatasetError(
                f"map too constrained: no endpoint pair beyond {min_distance} m "
                f"in {ENDPOINT_ATTEMPT_CAP} attempts"
            )
    return pairs


def trace_route(
    grid: OccupancyGrid,
    start: WorldPoint,
    goal: tuple[int, int],
    s: float,
    dt: float = 0.5,
    goal_radius: float = 0.3,
    cache: FieldCache | None = None,
    max_steps: int = 10_000,
) -> list[tuple[WorldPoint, tuple[float, float]]]:
    """Follow the descent velocity toward `goal`, recording (x_t, v_t)."""
    if cache is None:
        cache = FieldCache(grid)
    field = cache.get(goal)
    if not math.isfinite(field.value_at_point(grid, start)):
        raise DatasetError(f"goal {goal} unreachable from ({start.x}, {start.y})")
    goal_center = grid.cell_to_world(goal)
    pos = start
    out = []
    for _ in range(max_steps):
        if math.hypot(pos.x - goal_center.x, pos.y - goal_center.y) <= goal_radius:
            break
        try:
            v = desired_velocity(field, grid, pos, s)
        except ZeroGradientError:
            break
        out.append((pos, v))
        nxt = WorldPoint(pos.x + v[0] * dt, pos.y + v[1] * dt)
        if not grid.is_free_point(nxt):
            # cell-resolution gradients can clip corners; shrink the step
            nxt = WorldPoint(pos.x + v[0] * dt * 0.25, pos.y + v[1] * dt * 0.25)
            if not grid.is_free_point(nxt):
                break
        pos = nxt
    else:
        raise DatasetError(f"route toward {goal} did not terminate in {max_steps} steps")
    return out


def emit_samples(
    grid: OccupancyGrid,
    traces: list[list[tuple[WorldPoint, tuple[float, float]]]],
    out_path: str,
    s: float,
    cache: FieldCache | None = None,
    limit: int | None = None,
) -> int:
    """Write one record per trace step; returns the number written."""
    if cache is None:
        cache = FieldCache(grid)
    records = []
    for trace in traces:
        if not trace:
            continue
        x0 = trace[0][0]
        for xt, vt in trace:
            records.append((x0, xt, vt))
    if limit is not None:
        records = records[:limit]
    try:
        with open(out_path, "wb") as f:
            f.write(
                _HEADER.pack(
                    MAGIC, grid.width, grid.height, len(records),
                    grid.resolution, grid.origin_x, grid.origin_y,
                )
            )
            for x0, xt, vt in records:
                like = step_likelihood(grid, xt, vt, s, cache).astype(np.float32)
                f.write(_RECORD_FIXED.pack(x0.x, x0.y, xt.x, xt.y, vt[0], vt[1]))
                f.write(like.tobytes())
    except OSError as e:
        raise DatasetError(f"cannot write dataset {out_path}: {e}") from None
    return len(records)


def read_samples(path: str) -> tuple[dict, list[TrainingSample]]:
    """Read a dataset back; the likelihood grids round-trip bitwise."""
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise DatasetError(f"cannot read dataset {path}: {e}") from None
    if len(data) < _HEADER.size or data[:8] != MAGIC:
        raise DatasetError(f"{path}: not a sharednav dataset")
    magic, w, h, count, res, ox, oy = _HEADER.unpack_from(data, 0)
    header = {"width": w, "height": h, "count": count, "resolution": res, "origin": (ox, oy)}
    offset = _HEADER.size
    grid_bytes = w * h * 4
    samples = []
    for _ in range(count):
        x0x, x0y, xtx, xty, vx, vy = _RECORD_FIXED.unpack_from(data, offset)
        offset += _RECORD_FIXED.size
        like = np.frombuffer(data, dtype="<f4", count=w * h, offset=offset).reshape(h, w)
        offset += grid_bytes
        samples.append(TrainingSample((x0x, x0y), (xtx, xty), (vx, vy), like))
    return header, samples


def generate_dataset(
    grid: OccupancyGrid,
    n_samples: int,
    min_distance: float,
    seed: int,
    out_path: str,
    s: float = 0.3,
) -> int:
    """Trace routes between random endpoint pairs until `n_samples`
    records are available, then write exactly that many."""
    rng = np.random.Generator(np.random.PCG64(seed))
    cache = FieldCache(grid)
    traces = []
    total = 0
    while total < n_samples:
        (start, goal), = sample_endpoints(grid, min_distance, 1, rng)
        trace = trace_route(grid, start, goal, s, cache=cache)
        if not trace:
            continue
        traces.append(trace)
        total += len(trace)
    return emit_samples(grid, traces, out_path, s, cache, limit=n_samples)
