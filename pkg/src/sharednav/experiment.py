"""Condition-matrix experiment runner and summary statistics.

Runs the scripted-operator navigation task over a grid of (direction
set, accuracy, control mode) conditions, a fixed number of seeded trials
per condition, and writes raw per-trial rows plus a per-condition
summary with Welch tests (shared vs direct) per metric.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
import yaml
from scipy import stats

from .gridmap import OccupancyGrid, WorldPoint, inflate, load_map
from .potential_field import FieldCache
from .pseudo_user import Directions, InputCondition
from .shared_controller import ControlMode
from .simulator import SimParams, TrajectorySample, TrialResult, run_trial

RESULT_HEADER = "direction,accuracy,mode,seed,success,collisions,elapsed_s,path_length_m"

SUMMARY_HEADER = (
    "direction,accuracy,mode,trials,success_rate,"
    "collisions_mean,collisions_std,elapsed_mean,elapsed_std,path_mean,path_std,"
    "p_collisions,p_elapsed,p_path,sig_collisions,sig_elapsed,sig_path"
)


class ConfigError(Exception):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    map_path: str
    start: tuple[float, float]
    goal_cell: tuple[int, int]
    directions: tuple[Directions, ...] = (Directions.ALL, Directions.EIGHT, Directions.FOUR)
    accuracies: tuple[float, ...] = (1.0, 0.9, 0.8, 0.7)
    modes: tuple[ControlMode, ...] = (ControlMode.SHARED, ControlMode.DIRECT)
    trials_per_condition: int = 20
    base_seed: int = 0
    inflation_radius: float = 0.25
    params: SimParams = dc_field(default_factory=SimParams)

    def __post_init__(self):
        if self.trials_per_condition < 1:
            raise ConfigError("trials_per_condition must be >= 1")
        for name in ("s", "dt", "timeout", "goal_radius", "threshold", "beta"):
            if getattr(self.params, name) <= 0:
                raise ConfigError(f"parameter {name} must be positive")

    def conditions(self) -> list[InputCondition]:
        """All-directions runs only at full accuracy; discrete sets sweep it."""
        out = []
        for mode in self.modes:
            for d in self.directions:
                if d is Directions.ALL:
                    out.append(InputCondition(d, 1.0, 1.0, mode))
                else:
                    for a in self.accuracies:
                        out.append(InputCondition(d, a, 1.0, mode))
        return out


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as f:
            raw = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError(f"{path}: {e}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: bad YAML: {e}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    try:
        params = SimParams(**raw.get("params", {}))
        return ExperimentConfig(
            map_path=raw["map"],
            start=tuple(raw["start"]),
            goal_cell=tuple(raw["goal_cell"]),
            directions=tuple(Directions(d) for d in raw.get("directions", ["all", "eight", "four"])),
            accuracies=tuple(raw.get("accuracies", [1.0, 0.9, 0.8, 0.7])),
            modes=tuple(ControlMode(m) for m in raw.get("modes", ["shared", "direct"])),
            trials_per_condition=raw.get("trials_per_condition", 20),
            base_seed=raw.get("base_seed", 0),
            inflation_radius=raw.get("inflation_radius", 0.25),
            params=params,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"{path}: {e!r}") from None


def trial_seed(base_seed: int, condition: InputCondition, index: int) -> int:
    """Stable per-trial seed: base + a hash of the condition cell and index."""
    key = f"{condition.directions.value}|{condition.accuracy:g}|{condition.mode.value}|{index}"
    digest = hashlib.sha256(key.encode()).digest()
    return base_seed + int.from_bytes(digest[:6], "big")


def run_experiment(
    config: ExperimentConfig,
    grid: OccupancyGrid | None = None,
    trajectories: dict[str, list[TrajectorySample]] | None = None,
) -> list[TrialResult]:
    """Run every condition cell; rows come back in condition-then-seed order."""
    if grid is None:
        grid = inflate(load_map(config.map_path), config.inflation_radius)
    start = WorldPoint(*config.start)
    if not grid.is_free_point(start):
        raise ConfigError(f"start {config.start} is not on a free cell (after inflation)")
    if not grid.is_free_cell(config.goal_cell):
        raise ConfigError(f"goal cell {config.goal_cell} is occupied (after inflation)")
    cache = FieldCache(grid)
    results = []
    for condition in config.conditions():
        for i in range(config.trials_per_condition):
            seed = trial_seed(config.base_seed, condition, i)
            traj = None
            if trajectories is not None:
                traj = []
            result = run_trial(
                grid, start, config.goal_cell, condition, seed, config.params, cache, traj
            )
            if trajectories is not None:
                name = (
                    f"{condition.directions.value}_{condition.accuracy:g}_"
                    f"{condition.mode.value}_{seed}"
                )
                trajectories[name] = traj
            results.append(result)
    return results


def results_to_csv(results: list[TrialResult]) -> str:
    lines = [RESULT_HEADER]
    for r in results:
        lines.append(
            f"{r.condition.directions.value},{r.condition.accuracy:g},"
            f"{r.condition.mode.value},{r.seed},{int(r.success)},"
            f"{r.collisions},{r.elapsed:.6f},{r.path_length:.6f}"
        )
    return "\n".join(lines) + "\n"


def trajectory_to_csv(samples: list[TrajectorySample]) -> str:
    lines = ["t,x,y,vx_shared,vy_shared,c"]
    for p in samples:
        lines.append(f"{p.t:.6f},{p.x:.6f},{p.y:.6f},{p.vx:.6f},{p.vy:.6f},{p.confidence:.6f}")
    return "\n".join(lines) + "\n"


def welch_p(a: list[float], b: list[float]) -> float:
    """Two-sided Welch p-value; degenerate variance falls back to an
    exact-equality outcome (1.0 iff the samples have equal means)."""
    if len(a) < 2 or len(b) < 2:
        return math.nan
    if np.std(a) == 0.0 and np.std(b) == 0.0:
        return 1.0 if np.mean(a) == np.mean(b) else 0.0
    with warnings.catch_warnings():
        # near-identical samples trip scipy's precision-loss warning;
        # the p-value is still well-defined
        warnings.simplefilter("ignore", RuntimeWarning)
        return float(stats.ttest_ind(a, b, equal_var=False).pvalue)


def _sig_flag(p: float) -> str:
    if math.isnan(p):
        return ""
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


@dataclass(frozen=True)
class SummaryRow:
    direction: Directions
    accuracy: float
    mode: ControlMode
    trials: int
    success_rate: float
    collisions_mean: float
    collisions_std: float
    elapsed_mean: float
    elapsed_std: float
    path_mean: float
    path_std: float
    p_collisions: float
    p_elapsed: float
    p_path: float


def summarize(results: list[TrialResult]) -> list[SummaryRow]:
    """Per-condition means/stds plus shared-vs-direct Welch p per metric."""
    cells: dict[tuple, list[TrialResult]] = {}
    for r in results:
        key = (r.condition.directions, r.condition.accuracy, r.condition.mode)
        cells.setdefault(key, []).append(r)

    def metrics(rs):
        return (
            [float(r.collisions) for r in rs],
            [r.elapsed for r in rs],
            [r.path_length for r in rs],
        )

    rows = []
    for (direction, accuracy, mode), rs in cells.items():
        col, ela, pth = metrics(rs)
        other = cells.get((direction, accuracy, ControlMode.DIRECT if mode is ControlMode.SHARED else ControlMode.SHARED))
        if other is not None:
            ocol, oela, opth = metrics(other)
            p_c, p_e, p_p = welch_p(col, ocol), welch_p(ela, oela), welch_p(pth, opth)
        else:
            p_c = p_e = p_p = math.nan
        rows.append(
            SummaryRow(
                direction=direction,
                accuracy=accuracy,
                mode=mode,
                trials=len(rs),
                success_rate=sum(r.success for r in rs) / len(rs),
                collisions_mean=float(np.mean(col)),
                collisions_std=float(np.std(col, ddof=1)) if len(col) > 1 else 0.0,
                elapsed_mean=float(np.mean(ela)),
                elapsed_std=float(np.std(ela, ddof=1)) if len(ela) > 1 else 0.0,
                path_mean=float(np.mean(pth)),
                path_std=float(np.std(pth, ddof=1)) if len(pth) > 1 else 0.0,
                p_collisions=p_c,
                p_elapsed=p_e,
                p_path=p_p,
            )
        )
    return rows


def summary_to_csv(rows: list[SummaryRow]) -> str:
    lines = [SUMMARY_HEADER]
    for r in rows:
        def fmt_p(p):
            return "" if math.isnan(p) else f"{p:.6g}"

        lines.append(
            f"{r.direction.value},{r.accuracy:g},{r.mode.value},{r.trials},"
            f"{r.success_rate:.4f},"
            f"{r.collisions_mean:.4f},{r.collisions_std:.4f},"
            f"{r.elapsed_mean:.4f},{r.elapsed_std:.4f},"
            f"{r.path_mean:.4f},{r.path_std:.4f},"
            f"{fmt_p(r.p_collisions)},{fmt_p(r.p_elapsed)},{fmt_p(r.p_path)},"
            f"{_sig_flag(r.p_collisions)},{_sig_flag(r.p_elapsed)},{_sig_flag(r.p_path)}"
        )
    return "\n".join(lines) + "\n"
