"""Command-line entry points: simulate, gen-dataset, serve."""

from __future__ import annotations

import argparse
import math
import os
import sys

from .dataset import DatasetError, generate_dataset
from .experiment import (
    ConfigError,
    load_config,
    results_to_csv,
    run_experiment,
    summarize,
    summary_to_csv,
    trajectory_to_csv,
)
from .gridmap import MapLoadError, WorldPoint, inflate, load_map
from .potential_field import compute_field, field_to_csv


def simulate_main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="simulate", description="Run the scripted-operator condition matrix."
    )
    ap.add_argument("--config", required=True, help="experiment config (YAML)")
    ap.add_argument("--out", default="results.csv", help="per-trial CSV output")
    ap.add_argument("--summary", default=None, help="per-condition summary CSV")
    ap.add_argument("--trajectories", default=None, help="directory for per-trial trajectory CSVs")
    ap.add_argument("--dump-field", default=None, metavar="CSV",
                    help="dump the potential field toward the config goal and exit")
    args = ap.parse_args(argv)
    try:
        config = load_config(args.config)
        grid = inflate(load_map(config.map_path), config.inflation_radius)
    except (ConfigError, MapLoadError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    if args.dump_field:
        field = compute_field(grid, config.goal_cell)
        with open(args.dump_field, "w") as f:
            f.write(field_to_csv(field))
        print(f"wrote field {args.dump_field}")
        return 0
    trajectories = {} if args.trajectories else None
    try:
        results = run_experiment(config, grid, trajectories)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    with open(args.out, "w") as f:
        f.write(results_to_csv(results))
    print(f"wrote {len(results)} trial rows to {args.out}")
    if args.summary:
        with open(args.summary, "w") as f:
            f.write(summary_to_csv(summarize(results)))
        print(f"wrote summary {args.summary}")
    if trajectories is not None:
        os.makedirs(args.trajectories, exist_ok=True)
        for name, samples in trajectories.items():
            with open(os.path.join(args.trajectories, f"{name}.csv"), "w") as f:
                f.write(trajectory_to_csv(samples))
        print(f"wrote {len(trajectories)} trajectories to {args.trajectories}")
    return 0


def gen_dataset_main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="gen-dataset", description="Export goal-likelihood training samples."
    )
    ap.add_argument("--map", required=True)
    ap.add_argument("--samples", type=int, required=True, help="number of records to emit")
    ap.add_argument("--min-distance", type=float, default=None,
                    help="minimum start/goal separation in meters (default: half the map diagonal)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", required=True)
    ap.add_argument("--speed", type=float, default=0.3)
    ap.add_argument("--inflate", type=float, default=0.25, metavar="RADIUS")
    args = ap.parse_args(argv)
    try:
        grid = inflate(load_map(args.map), args.inflate)
    except MapLoadError as e:
        print(f"map error: {e}", file=sys.stderr)
        return 2
    min_distance = args.min_distance
    if min_distance is None:
        min_distance = 0.5 * math.hypot(grid.width * grid.resolution, grid.height * grid.resolution)
    try:
        n = generate_dataset(grid, args.samples, min_distance, args.seed, args.out, args.speed)
    except DatasetError as e:
        print(f"dataset error: {e}", file=sys.stderr)
        return 2
    print(f"wrote {n} samples to {args.out}")
    return 0


def serve_main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="serve", description="Live teleoperation server.")
    ap.add_argument("--map", required=True)
    ap.add_argument("--port", type=int, default=8000)
    ap.add_argument("--host", default="127.0.0.1")
    ap.add_argument("--tick-hz", type=float, default=20.0)
    ap.add_argument("--start", type=float, nargs=2, required=True, metavar=("X", "Y"))
    ap.add_argument("--goal-cell", type=int, nargs=2, required=True, metavar=("CX", "CY"))
    ap.add_argument("--inflate", type=float, default=0.25, metavar="RADIUS")
    ap.add_argument("--static-dir", default=None, help="frontend assets served under /")
    ap.add_argument("--time-scale", type=float, default=1.0)
    args = ap.parse_args(argv)
    try:
        grid = inflate(load_map(args.map), args.inflate)
    except MapLoadError as e:
        print(f"map error: {e}", file=sys.stderr)
        return 2
    from .service import create_app  # deferred: fastapi import is slow

    static_dir = args.static_dir
    if static_dir is None:
        bundled = os.path.join(os.path.dirname(__file__), "..", "..", "frontend", "dist")
        if os.path.isdir(bundled):
            static_dir = bundled
    app = create_app(
        grid,
        WorldPoint(*args.start),
        tuple(args.goal_cell),
        tick_hz=args.tick_hz,
        static_dir=static_dir,
        time_scale=args.time_scale,
    )
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(simulate_main())
