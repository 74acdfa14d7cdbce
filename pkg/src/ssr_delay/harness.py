"""Scenario grids: configuration, deterministic execution and CSV/JSON output.

A grid is the cross product of true scenarios, recruitment patterns and
delay lengths for one design. Replicates are simulated in fixed blocks; each
block draws stage 1 once and then finishes every delay length from the same
data, which is what makes comparisons across delays pathwise. Results are
reassembled in replicate order, so the output is the same for any number of
worker processes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .design import DesignSpec, reference_binary_design, reference_continuous_design
from .engine import ESTIMATORS, OutcomeBatch, ScenarioTruth, finish, stage_one
from .metrics import ScenarioSummary, single_stage_metrics, summarize
from .recruitment import PATTERNS, T1_MODES, RecruitmentPlan
from .rng import derive_keys, derive_stream, family_id
from .statdist import POWER_MODES

BLOCK_SIZE = 2000
DEFAULT_SEED = 42
TABLE_DELAYS = tuple(range(0, 25, 3))
FIGURE_DELAYS = tuple(range(1, 25))
FIGURE_METRICS = ("rmse", "cost", "impact", "nstar-dist")

__all__ = [
    "ConfigError", "ScenarioGrid", "load_config", "grid_from_dict", "derive_stream",
    "run_cells", "run_grid", "table_grid", "reproduce_table", "emit_figure_data",
    "summaries_csv", "summaries_json", "TABLE_IDS",
]


class ConfigError(ValueError):
    """A configuration value is missing, malformed or out of range."""


@dataclass
class ScenarioGrid:
    design: DesignSpec
    truths: list[ScenarioTruth]
    patterns: list[str] = field(default_factory=lambda: ["uniform"])
    delays_m: list[float] = field(default_factory=lambda: list(TABLE_DELAYS))
    replicates: int = 10_000
    base_seed: int = DEFAULT_SEED
    horizon_t: float = 24.0
    t1_mode: str = "table-compatible"
    power_mode: str = "normal"
    estimator: str = "lumped"
    cap: float | None = None

    def __post_init__(self):
        self.truths = [t.with_delta(self.design.delta1) for t in self.truths]
        for t in self.truths:
            if t.endpoint != self.design.endpoint:
                raise ConfigError(f"truths: endpoint {t.endpoint!r} does not match design")
        if self.replicates < 1:
            raise ConfigError("replicates: must be at least 1")
        for p in self.patterns:
            if p not in PATTERNS:
                raise ConfigError(f"patterns: unknown pattern {p!r}; expected one of {PATTERNS}")
        if self.t1_mode not in T1_MODES:
            raise ConfigError(f"t1_mode: expected one of {T1_MODES}, got {self.t1_mode!r}")
        if self.power_mode not in POWER_MODES:
            raise ConfigError(f"power_mode: expected one of {POWER_MODES}, got {self.power_mode!r}")
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"estimator: expected one of {ESTIMATORS}, got {self.estimator!r}")
        if any(m < 0 for m in self.delays_m):
            raise ConfigError("delays_m: delays must be non-negative")
        if not self.horizon_t > 0:
            raise ConfigError("horizon_t: must be positive")
        if self.cap is not None and self.cap < self.design.n1:
            raise ConfigError("cap: must be at least n1")

    def cells(self) -> list[tuple[int, str, float]]:
        return [(i, p, m) for i in range(len(self.truths)) for p in self.patterns for m in self.delays_m]

    def plan(self, pattern: str) -> RecruitmentPlan:
        return RecruitmentPlan.fit(self.design, pattern, self.horizon_t, self.t1_mode)


# -- configuration -----------------------------------------------------------

_DESIGN_KEYS = {"endpoint", "alpha", "beta", "delta1", "sd_init", "p1_init", "p2_init", "n1"}
_TRUTH_KEYS = {"continuous": {"sd_truth", "delta_truth"}, "binary": {"pi1", "pi2", "delta_truth"}}
_GRID_KEYS = {"design", "truths", "patterns", "delays_m", "replicates", "base_seed", "horizon_t",
              "t1_mode", "power_mode", "estimator", "cap"}


def _number(section: str, key: str, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}{key}: expected a number, got {value!r}")
    if kind is int and int(value) != value:
        raise ConfigError(f"{section}{key}: expected an integer, got {value!r}")
    return kind(value)


def _check_keys(section: str, data: dict, allowed: set):
    if not isinstance(data, dict):
        raise ConfigError(f"{section or 'config'}: expected a mapping")
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"{section}{unknown[0]}: unknown key")


def grid_from_dict(data: dict) -> ScenarioGrid:
    """Validate a parsed configuration mapping and build the grid."""
    _check_keys("", data, _GRID_KEYS)
    if "design" not in data:
        raise ConfigError("design: section is required")
    d = dict(data["design"] or {})
    _check_keys("design.", d, _DESIGN_KEYS)
    endpoint = d.get("endpoint", "continuous")
    if endpoint not in ("continuous", "binary"):
        raise ConfigError(f"design.endpoint: expected 'continuous' or 'binary', got {endpoint!r}")
    kw = {"endpoint": endpoint}
    for key in ("alpha", "beta", "delta1", "sd_init", "p1_init", "p2_init"):
        if key in d and d[key] is not None:
            kw[key] = _number("design.", key, d[key])
    if "n1" in d:
        kw["n1"] = _number("design.", "n1", d["n1"], int)
    if endpoint == "binary":
        kw.setdefault("sd_init", None)
        kw.setdefault("delta1", 0.25)
        kw.setdefault("n1", 30)
    alpha, beta = kw.get("alpha", 0.05), kw.get("beta", 0.2)
    if not 0 < alpha < 1:
        raise ConfigError(f"design.alpha: must lie in (0, 1), got {alpha!r}")
    if not 0 < beta < 1:
        raise ConfigError(f"design.beta: must lie in (0, 1), got {beta!r}")
    n1 = kw.get("n1", 70)
    if n1 < 4 or n1 % 2:
        raise ConfigError(f"design.n1: must be an even integer >= 4, got {n1!r}")
    try:
        design = DesignSpec(**kw)
    except ValueError as exc:
        raise ConfigError(f"design: {exc}") from exc

    raw_truths = data.get("truths")
    if not raw_truths:
        raise ConfigError("truths: at least one scenario is required")
    truths = []
    for i, t in enumerate(raw_truths):
        _check_keys(f"truths[{i}].", t, _TRUTH_KEYS[endpoint])
        vals = {k: _number(f"truths[{i}].", k, v) for k, v in t.items() if v is not None}
        try:
            truths.append(ScenarioTruth(endpoint, **vals))
        except ValueError as exc:
            raise ConfigError(f"truths[{i}]: {exc}") from exc

    kw = {"design": design, "truths": truths}
    if "patterns" in data:
        pats = data["patterns"]
        kw["patterns"] = [pats] if isinstance(pats, str) else list(pats)
    if "delays_m" in data:
        kw["delays_m"] = [_number("", "delays_m", m) for m in data["delays_m"]]
    if "replicates" in data:
        kw["replicates"] = _number("", "replicates", data["replicates"], int)
    if "base_seed" in data:
        kw["base_seed"] = _number("", "base_seed", data["base_seed"], int)
    if "horizon_t" in data:
        kw["horizon_t"] = _number("", "horizon_t", data["horizon_t"])
    for key in ("t1_mode", "power_mode", "estimator"):
        if key in data:
            kw[key] = str(data[key])
    if data.get("cap") is not None:
        kw["cap"] = _number("", "cap", data["cap"])
    return ScenarioGrid(**kw)


def load_config(path) -> ScenarioGrid:
    """Read a YAML scenario file; see ``configs/`` for annotated examples."""
    try:
        data = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: could not parse {path}: {exc}") from exc
    return grid_from_dict(data or {})


# -- execution ---------------------------------------------------------------

def _run_block(args):
    design, truth, plan, delays, seed, label, start, stop, estimator, cap = args
    seeds, gammas = derive_keys(seed, family_id(label), np.arange(start, stop))
    s1 = stage_one(design, truth, seeds, gammas, 0, estimator)
    return [finish(design, truth, s1, plan.n_delay(m), cap) for m in delays]


def run_cells(grid: ScenarioGrid, worker_count: int = 1) -> dict[tuple[int, str, float], OutcomeBatch]:
    """Simulate every cell of the grid; keys are ``(truth_index, pattern, m)``."""
    if worker_count < 1:
        raise ValueError("worker_count must be positive")
    if not grid.delays_m:
        return {}
    tasks, owners = [], []
    for ti, truth in enumerate(grid.truths):
        for pattern in grid.patterns:
            plan = grid.plan(pattern)
            label = truth.family_label(pattern)
            for start in range(0, grid.replicates, BLOCK_SIZE):
                stop = min(start + BLOCK_SIZE, grid.replicates)
                tasks.append((grid.design, truth, plan, list(grid.delays_m), grid.base_seed,
                              label, start, stop, grid.estimator, grid.cap))
                owners.append((ti, pattern))
    if worker_count == 1 or len(tasks) == 1:
        results = [_run_block(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=worker_count) as pool:
            results = list(pool.map(_run_block, tasks))

    parts: dict[tuple[int, str, float], list[OutcomeBatch]] = {}
    for (ti, pattern), per_m in zip(owners, results):
        for m, batch in zip(grid.delays_m, per_m):
            parts.setdefault((ti, pattern, m), []).append(batch)
    return {key: OutcomeBatch.concat(parts[key]) for key in grid.cells()}


def run_grid(grid: ScenarioGrid, worker_count: int = 1) -> list[ScenarioSummary]:
    """One summary per cell, ordered truth -> pattern -> delay."""
    cells = run_cells(grid, worker_count)
    return [
        summarize(cells[(ti, p, m)], grid.design, grid.truths[ti], p, m, grid.power_mode)
        for ti, p, m in grid.cells()
    ]


# -- output ------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.6g}"


def write_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def table_header(endpoint: str) -> list[str]:
    blinded = "avg_blinded_sd" if endpoint == "continuous" else "avg_p"
    return ["truth_param", "empirical_power", "m", "n_oracle", "avg_N_star", "n_delay", blinded,
            "mse_single", "mse_ssr", "cost_single", "cost_ssr", "delay_impact"]


def table_csv(summaries: list[ScenarioSummary]) -> str:
    endpoint = summaries[0].endpoint if summaries else "continuous"
    rows = [(s.truth_param, s.empirical_power, s.m, s.n_oracle, s.avg_n_final, s.n_delay,
             s.avg_blinded, s.mse_single, s.mse_ssr, s.cost_single, s.cost_ssr, s.delay_impact)
            for s in summaries]
    return write_csv(table_header(endpoint), rows)


SUMMARY_COLUMNS = ["endpoint", "truth_param", "pattern", "n1", "m", "replicates", "empirical_power",
                   "avg_n_final", "avg_blinded", "n_oracle", "n_delay", "mse_single", "mse_ssr",
                   "rmse_ssr", "cost_single", "cost_ssr", "delay_impact"]


def summaries_csv(summaries: list[ScenarioSummary]) -> str:
    return write_csv(SUMMARY_COLUMNS, [[getattr(s, c) for c in SUMMARY_COLUMNS] for s in summaries])


def summaries_json(summaries: list[ScenarioSummary], meta: dict | None = None) -> str:
    """Full-precision mirror of a run, including Monte Carlo standard errors."""
    doc = {"meta": meta or {}, "cells": [s.as_dict() for s in summaries]}
    return json.dumps(doc, indent=2, allow_nan=True)


# -- published tables ----------------------------------------------------------

TABLE_IDS = ("S1", "S2", "S3", "S4")


def table_grid(table_id: str, base_seed: int = DEFAULT_SEED, replicates: int = 10_000,
               t1_mode: str = "table-compatible", power_mode: str = "normal") -> ScenarioGrid:
    """Grid behind one of the supplementary tables (S1/S2 continuous, S3/S4 binary)."""
    table_id = table_id.upper()
    if table_id not in TABLE_IDS:
        raise ValueError(f"unknown table id {table_id!r}; expected one of {TABLE_IDS}")
    pattern = "uniform" if table_id in ("S1", "S3") else "linear"
    if table_id in ("S1", "S2"):
        design = reference_continuous_design()
        truths = [ScenarioTruth("continuous", sd) for sd in (8.0, 10.0, 12.0)]
    else:
        design = reference_binary_design()
        truths = [ScenarioTruth("binary", pi1=p, delta_truth=0.25) for p in (0.1, 0.3, 0.5)]
    return ScenarioGrid(design, truths, [pattern], list(TABLE_DELAYS), replicates, base_seed,
                        24.0, t1_mode, power_mode)


def reproduce_table(table_id: str, base_seed: int = DEFAULT_SEED, replicates: int = 10_000,
                    worker_count: int = 1, t1_mode: str = "table-compatible",
                    power_mode: str = "normal") -> str:
    grid = table_grid(table_id, base_seed, replicates, t1_mode, power_mode)
    return table_csv(run_grid(grid, worker_count))


# -- figure data ---------------------------------------------------------------

def emit_figure_data(grid: ScenarioGrid, metric: str, worker_count: int = 1) -> str:
    """Long-format CSV behind the delay figures.

    ``rmse``, ``cost`` and ``impact`` give one row per cell, with the
    single-stage comparator where one exists; ``nstar-dist`` gives one row per
    replicate with its final size and test decision.
    """
    if metric not in FIGURE_METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {FIGURE_METRICS}")
    return write_csv(*figure_rows(grid, metric, worker_count))


def figure_rows(grid: ScenarioGrid, metric: str, worker_count: int = 1):
    if metric == "nstar-dist":
        header = ["truth_param", "pattern", "n1", "m", "replicate", "n_final", "reject"]
        cells = run_cells(grid, worker_count)
        rows = []
        for ti, p, m in grid.cells():
            b = cells[(ti, p, m)]
            param = grid.truths[ti].param
            rows.extend((param, p, grid.design.n1, m, i, b.n_final_recorded[i], int(b.reject[i]))
                        for i in range(len(b)))
        return header, rows
    header = ["truth_param", "pattern", "n1", "m", "metric", "value", "single_stage"]
    rows = []
    for s in run_grid(grid, worker_count):
        if metric == "rmse":
            value, single = s.rmse_ssr, math.sqrt(s.mse_single)
        elif metric == "cost":
            value, single = s.cost_ssr, s.cost_single
        else:
            value, single = s.delay_impact, ""
        rows.append((s.truth_param, s.pattern, s.n1, s.m, metric, value, single))
    return header, rows


def with_n1(grid: ScenarioGrid, n1: int) -> ScenarioGrid:
    """Same grid with a different stage-1 size (the planned size is unchanged)."""
    return replace(grid, design=replace(grid.design, n1=n1))


def single_stage_table(grid: ScenarioGrid) -> list[tuple[float, float, float]]:
    out = []
    for t in grid.truths:
        n_oracle = grid.design.oracle_n(t)
        out.append((t.param, *single_stage_metrics(grid.design.n_init, n_oracle, t,
                                                   grid.design.alpha, grid.power_mode,
                                                   grid.design.delta1)))
    return out
