"""Simulation of two-stage blinded SSR trials with delayed outcomes.

Replicates are simulated in vectorised batches. Each replicate owns one
counter-based stream and the participant layout inside it is fixed: the
``j``-th control participant reads position ``2j`` and the ``j``-th
experimental participant position ``2j + 1``. Stage 1 is pairs
``0 .. n1/2 - 1`` and stage 2 continues from there, so the stage-1 data of a
replicate are the same for every delay length (common random numbers) and a
replicate's result does not depend on which batch it was simulated in.

Per-replicate sums are accumulated with ``np.bincount``, which adds the
elements of each replicate sequentially in position order; a batch of one
therefore reproduces a replicate from a large batch bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .design import DesignSpec
from .recruitment import RecruitmentPlan
from .statdist import std_normal_quantile, t_critical, t_statistic_from_moments

ESTIMATORS = ("lumped", "pooled")


@dataclass(frozen=True)
class ScenarioTruth:
    """True data-generating values for one scenario.

    Continuous: arms are N(0, sd_truth^2) and N(delta_truth, sd_truth^2).
    Binary: success rates ``pi1`` (control) and ``pi2`` (experimental).
    """

    endpoint: str = "continuous"
    sd_truth: float | None = None
    pi1: float | None = None
    pi2: float | None = None
    delta_truth: float | None = None

    def __post_init__(self):
        if self.endpoint == "continuous":
            if self.sd_truth is None or self.sd_truth < 0:
                raise ValueError("continuous truths need sd_truth >= 0")
        elif self.endpoint == "binary":
            if self.pi1 is None:
                raise ValueError("binary truths need pi1")
            if self.pi2 is None and self.delta_truth is not None:
                object.__setattr__(self, "pi2", self.pi1 + self.delta_truth)
            if self.pi2 is None:
                raise ValueError("binary truths need pi2 or delta_truth")
            if not (0.0 <= self.pi1 <= 1.0 and 0.0 <= self.pi2 <= 1.0):
                raise ValueError("success rates must lie in [0, 1]")
            if self.delta_truth is None:
                object.__setattr__(self, "delta_truth", self.pi2 - self.pi1)
        else:
            raise ValueError(f"unknown endpoint {self.endpoint!r}")

    @property
    def param(self) -> float:
        """The value used to label this truth in tables (SD or control rate)."""
        return self.sd_truth if self.endpoint == "continuous" else self.pi1

    def with_delta(self, delta1: float) -> "ScenarioTruth":
        if self.endpoint == "continuous" and self.delta_truth is None:
            return ScenarioTruth("continuous", self.sd_truth, delta_truth=delta1)
        return self

    def family_label(self, pattern: str) -> str:
        # Numbers go through float() so that 12 and 12.0 name the same family.
        delta = None if self.delta_truth is None else float(self.delta_truth)
        return f"{self.endpoint}/{float(self.param)!r}/{delta!r}/{pattern}"


@dataclass(frozen=True)
class ReplicateOutcome:
    blinded_estimate: float
    n_star: float
    n2_star: int
    n_delay: float
    n_final_recorded: float
    n_final_generated: int
    truncated: bool
    reject: bool
    test_stat: float


@dataclass
class OutcomeBatch:
    """Column arrays for many replicates of one scenario cell, in replicate order."""

    blinded_estimate: np.ndarray
    n_star: np.ndarray
    n2_star: np.ndarray
    n_delay: float
    n_final_recorded: np.ndarray
    n_final_generated: np.ndarray
    truncated: np.ndarray
    reject: np.ndarray
    test_stat: np.ndarray

    def __len__(self):
        return len(self.n_star)

    def __getitem__(self, i) -> ReplicateOutcome:
        return ReplicateOutcome(
            float(self.blinded_estimate[i]), float(self.n_star[i]), int(self.n2_star[i]),
            float(self.n_delay), float(self.n_final_recorded[i]), int(self.n_final_generated[i]),
            bool(self.truncated[i]), bool(self.reject[i]), float(self.test_stat[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @classmethod
    def concat(cls, parts: list["OutcomeBatch"]) -> "OutcomeBatch":
        cols = {}
        for name in ("blinded_estimate", "n_star", "n2_star", "n_final_recorded",
                     "n_final_generated", "truncated", "reject", "test_stat"):
            cols[name] = np.concatenate([getattr(p, name) for p in parts])
        return cls(n_delay=parts[0].n_delay, **cols)


def lumped_variance(values) -> float:
    """One-sample variance of all values, ignoring arm labels (divisor n - 1)."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two observations")
    return float(((x - x.mean()) ** 2).sum() / (x.size - 1))


def pooled_within_arm_variance(arm_e, arm_c) -> float:
    """Pooled within-arm variance ``((n_E-1)s_E^2 + (n_C-1)s_C^2) / (n_E+n_C-2)``."""
    e = np.asarray(arm_e, dtype=float)
    c = np.asarray(arm_c, dtype=float)
    if e.size < 2 or c.size < 2:
        raise ValueError("each arm needs at least two observations")
    ss = ((e - e.mean()) ** 2).sum() + ((c - c.mean()) ** 2).sum()
    return float(ss / (e.size + c.size - 2))


def pooled_success_rate(x1: int, x2: int, n1: int) -> float:
    if n1 <= 0 or x1 < 0 or x2 < 0 or x1 + x2 > n1:
        raise ValueError("need 0 <= x1, x2 and x1 + x2 <= n1 with n1 > 0")
    return (x1 + x2) / n1


def final_sample_size(n1: int, n2_star: float, n_delay: float) -> tuple[float, bool]:
    """Final total when pipeline participants keep arriving during the delay.

    A tie ``n2_star == n_delay`` counts as truncated.
    """
    if n2_star > n_delay:
        return n1 + n2_star, False
    return n1 + n_delay, True


def binary_u_statistic(x1, x2, n_total):
    """Normal-approximation statistic for ``pi2 > pi1`` with ``n_total/2`` per arm.

    ``x1`` and ``x2`` are control and experimental successes. A pooled rate of
    exactly 0 or 1 carries no information and gives ``U = 0``.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    n = np.asarray(n_total, dtype=float)
    half = n / 2.0
    pbar = (x1 + x2) / n
    denom = np.sqrt(pbar * (1.0 - pbar))
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.sqrt(n / 4.0) * (x2 / half - x1 / half) / np.where(denom > 0, denom, 1.0)
    u = np.where(denom > 0, u, 0.0)
    return float(u) if u.ndim == 0 else u


def _ceil_even(x: np.ndarray) -> np.ndarray:
    c = np.ceil(np.asarray(x, float)).astype(np.int64)
    return c + c % 2


def _rowsum(rep: np.ndarray, w: np.ndarray, size: int) -> np.ndarray:
    return np.bincount(rep, weights=w, minlength=size)


@dataclass
class StageOne:
    """Stage-1 summaries for a batch of replicates (control arm C, experimental E)."""

    seeds: np.ndarray
    gammas: np.ndarray
    base: np.ndarray
    n1: int
    sum_c: np.ndarray
    sum_e: np.ndarray
    ss_c: np.ndarray
    ss_e: np.ndarray
    blinded_estimate: np.ndarray
    n_star: np.ndarray

    def __len__(self):
        return len(self.seeds)


def _arm_values(design, truth, seeds, gammas, counters, arm: int) -> np.ndarray:
    """Observations of one arm (0 = C, 1 = E) at the given stream positions."""
    if design.endpoint == "continuous":
        if truth.sd_truth == 0:
            return np.full(np.shape(counters), arm * truth.delta_truth, dtype=float)
        z = rng.std_normal_at(seeds, gammas, counters)
        z *= truth.sd_truth
        if arm:
            z += truth.delta_truth
        return z
    u = rng.uniform_at(seeds, gammas, counters)
    return (u < (truth.pi2 if arm else truth.pi1)).astype(np.float64)


def _sum_and_ss(rep, x, size, count):
    """Per-replicate sums and sums of squared deviations (two-pass)."""
    total = _rowsum(rep, x, size)
    mean = np.divide(total, count, out=np.zeros(size), where=count > 0)
    dev = x - mean[rep]
    return total, mean, _rowsum(rep, dev * dev, size)


def stage_one(design: DesignSpec, truth: ScenarioTruth, seeds, gammas, base=0,
              estimator: str = "lumped") -> StageOne:
    """Draw stage-1 data and compute the blinded estimate and re-estimated size."""
    if estimator not in ESTIMATORS:
        raise ValueError(f"estimator must be one of {ESTIMATORS}, got {estimator!r}")
    truth = truth.with_delta(design.delta1)
    seeds = np.asarray(seeds, dtype=np.uint64)
    gammas = np.asarray(gammas, dtype=np.uint64)
    r = seeds.size
    base = np.broadcast_to(np.asarray(base, dtype=np.uint64), (r,))
    n1 = design.n1
    half = n1 // 2
    pair = np.arange(half, dtype=np.uint64)
    counters = base[:, None] + np.uint64(2) * pair[None, :]
    xc = _arm_values(design, truth, seeds[:, None], gammas[:, None], counters, 0)
    xe = _arm_values(design, truth, seeds[:, None], gammas[:, None], counters + np.uint64(1), 1)
    rep = np.repeat(np.arange(r), half)
    counts = np.full(r, float(half))
    sum_c, _, ss_c = _sum_and_ss(rep, xc.ravel(), r, counts)
    sum_e, _, ss_e = _sum_and_ss(rep, xe.ravel(), r, counts)

    if design.endpoint == "continuous":
        if estimator == "lumped":
            # label-free: interleave back into recruitment order C, E, C, E, ...
            pooled = np.stack([xc, xe], axis=2).reshape(r, n1).ravel()
            _, _, ss = _sum_and_ss(np.repeat(np.arange(r), n1), pooled, r, np.full(r, float(n1)))
            var = ss / (n1 - 1)
        else:
            var = (ss_c + ss_e) / (n1 - 2)
        est = np.sqrt(var)
    else:
        est = (sum_c + sum_e) / n1
    n_star = np.asarray(design.reestimate(est), dtype=float)
    return StageOne(seeds, gammas, base, n1, sum_c, sum_e, ss_c, ss_e, est, n_star)


def finish(design: DesignSpec, truth: ScenarioTruth, s1: StageOne, n_delay: float,
           cap: float | None = None) -> OutcomeBatch:
    """Apply the delayed final-size rule, draw stage 2 and run the final test."""
    truth = truth.with_delta(design.delta1)
    r = len(s1)
    n1 = s1.n1
    n_star = s1.n_star
    n2_star = np.maximum(0, _ceil_even(n_star) - n1)
    truncated = n2_star <= n_delay
    recorded = n1 + np.where(truncated, float(n_delay), n2_star.astype(float))
    if cap is not None:
        recorded = np.minimum(recorded, float(cap))
    generated = np.maximum(_ceil_even(recorded), n1)

    # stage 2: pairs n1/2 .. generated/2 - 1 of each replicate's stream
    extra = (generated - n1) // 2
    rep = np.repeat(np.arange(r), extra)
    starts = np.cumsum(extra) - extra
    pair = (np.arange(rep.size, dtype=np.int64) - starts[rep] + n1 // 2).astype(np.uint64)
    counters = s1.base[rep] + np.uint64(2) * pair
    seeds, gammas = s1.seeds[rep], s1.gammas[rep]
    xc = _arm_values(design, truth, seeds, gammas, counters, 0)
    xe = _arm_values(design, truth, seeds, gammas, counters + np.uint64(1), 1)
    extra_f = extra.astype(float)
    sum2_c, m2_c, ss2_c = _sum_and_ss(rep, xc, r, extra_f)
    sum2_e, m2_e, ss2_e = _sum_and_ss(rep, xe, r, extra_f)

    half1 = n1 / 2.0
    per_arm = generated / 2.0
    if design.endpoint == "continuous":
        m1_c, m1_e = s1.sum_c / half1, s1.sum_e / half1
        # merge stage summaries with the parallel-variance update
        w = half1 * extra_f / per_arm
        ss_c = s1.ss_c + ss2_c + w * (m1_c - m2_c) ** 2
        ss_e = s1.ss_e + ss2_e + w * (m1_e - m2_e) ** 2
        mean_c = (s1.sum_c + sum2_c) / per_arm
        mean_e = (s1.sum_e + sum2_e) / per_arm
        stat = np.asarray(t_statistic_from_moments(mean_e, mean_c, ss_e, ss_c, per_arm, per_arm))
        crit = np.asarray(t_critical(design.alpha, generated - 2.0))
        reject = stat >= crit
    else:
        stat = np.asarray(binary_u_statistic(s1.sum_c + sum2_c, s1.sum_e + sum2_e, generated))
        reject = stat > std_normal_quantile(1.0 - design.alpha)

    return OutcomeBatch(
        blinded_estimate=s1.blinded_estimate, n_star=n_star, n2_star=n2_star,
        n_delay=float(n_delay), n_final_recorded=recorded, n_final_generated=generated,
        truncated=truncated, reject=reject, test_stat=stat,
    )


def simulate_batch(design, truth, plan: RecruitmentPlan, m, seeds, gammas, base=0,
                   estimator: str = "lumped", cap: float | None = None) -> OutcomeBatch:
    s1 = stage_one(design, truth, seeds, gammas, base, estimator)
    return finish(design, truth, s1, plan.n_delay(m), cap)


def _run_single(design, truth, plan, m, stream, estimator, cap) -> ReplicateOutcome:
    batch = simulate_batch(design, truth, plan, m, [stream.seed], [stream.gamma],
                           stream.counter, estimator, cap)
    out = batch[0]
    stream.counter += out.n_final_generated
    return out


def run_replicate_continuous(design: DesignSpec, truth: ScenarioTruth, plan: RecruitmentPlan,
                             m: float, stream: rng.RngStream, estimator: str = "lumped",
                             cap: float | None = None) -> ReplicateOutcome:
    """Simulate one continuous-endpoint trial from ``stream``.

    The blinded SD is the square root of the lumped stage-1 variance unless
    ``estimator="pooled"``. The stream is advanced past the positions used.
    """
    if design.endpoint != "continuous":
        raise ValueError("design endpoint must be continuous")
    return _run_single(design, truth, plan, m, stream, estimator, cap)


def run_replicate_binary(design: DesignSpec, truth: ScenarioTruth, plan: RecruitmentPlan,
                         m: float, stream: rng.RngStream, cap: float | None = None) -> ReplicateOutcome:
    if design.endpoint != "binary":
        raise ValueError("design endpoint must be binary")
    return _run_single(design, truth, plan, m, stream, "lumped", cap)


def max_binary_n_star(design: DesignSpec) -> float:
    """Largest re-estimated size any binary stage-1 outcome can produce (p = 0.5)."""
    return float(design.reestimate(0.5))


def replicate_keys(base_seed: int, label: str, start: int, stop: int):
    return rng.derive_keys(base_seed, rng.family_id(label), np.arange(start, stop))


__all__ = [
    "ScenarioTruth", "ReplicateOutcome", "OutcomeBatch", "StageOne", "lumped_variance",
    "pooled_within_arm_variance", "pooled_success_rate", "final_sample_size",
    "binary_u_statistic", "stage_one", "finish", "simulate_batch",
    "run_replicate_continuous", "run_replicate_binary", "max_binary_n_star",
]
