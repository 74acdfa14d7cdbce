"""Efficiency measures for a set of simulated replicates.

Every function accepts either an :class:`~ssr_delay.engine.OutcomeBatch` or a
plain sequence of :class:`~ssr_delay.engine.ReplicateOutcome`. Averages are
taken over the replicates in index order so the result does not depend on
how they were produced.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .statdist import power_binary, power_continuous


def _column(outcomes, name: str) -> np.ndarray:
    if hasattr(outcomes, name) and not isinstance(outcomes, (list, tuple)):
        col = np.asarray(getattr(outcomes, name))
    else:
        col = np.asarray([getattr(o, name) for o in outcomes])
    if col.size == 0:
        raise ValueError("need at least one replicate outcome")
    return col


def true_power(n_total, truth, alpha: float, power_mode: str = "normal", delta: float | None = None):
    """Power at size ``n_total`` under the true nuisance values of ``truth``."""
    if truth.endpoint == "continuous":
        d = truth.delta_truth if delta is None else delta
        if d is None:
            raise ValueError("continuous power needs an effect size")
        return power_continuous(n_total, d, truth.sd_truth, alpha, mode=power_mode)
    return power_binary(n_total, truth.pi1, truth.pi2, alpha)


def delay_impact(outcomes) -> float:
    """Share of replicates whose final size was set by the pipeline."""
    return float(_column(outcomes, "truncated").mean())


def empirical_power(outcomes) -> float:
    return float(_column(outcomes, "reject").mean())


def mse(outcomes, n_oracle: float) -> float:
    dev = _column(outcomes, "n_final_recorded") - n_oracle
    return float(np.mean(dev * dev))


def rmse(outcomes, n_oracle: float) -> float:
    return math.sqrt(mse(outcomes, n_oracle))


def cost(outcomes, n_oracle: float, truth, alpha: float, power_mode: str = "normal",
         delta: float | None = None) -> float:
    """Mean of ``(N* - n_oracle)^2 / (100 * Power(N*))`` at the recorded (real) N*."""
    n_final = _column(outcomes, "n_final_recorded").astype(float)
    pw = np.asarray(true_power(n_final, truth, alpha, power_mode, delta))
    return float(np.mean((n_final - n_oracle) ** 2 / (100.0 * pw)))


def single_stage_metrics(n_init: float, n_oracle: float, truth, alpha: float,
                         power_mode: str = "normal", delta: float | None = None) -> tuple[float, float]:
    """MSE and cost of the fixed design that simply runs ``n_init`` participants."""
    mse_single = (n_init - n_oracle) ** 2
    pw = float(true_power(n_init, truth, alpha, power_mode, delta))
    return mse_single, mse_single / (100.0 * pw)


@dataclass(frozen=True)
class ScenarioSummary:
    """Aggregated results for one (truth, recruitment pattern, delay) cell."""

    endpoint: str
    truth_param: float
    pattern: str
    n1: int
    m: float
    replicates: int
    empirical_power: float
    avg_n_final: float
    avg_blinded: float
    n_oracle: float
    n_delay: float
    mse_single: float
    mse_ssr: float
    rmse_ssr: float
    cost_single: float
    cost_ssr: float
    delay_impact: float
    se_power: float
    se_avg_n_final: float
    se_mse_ssr: float
    se_cost_ssr: float
    se_delay_impact: float

    def as_dict(self) -> dict:
        return asdict(self)


def _se(x: np.ndarray) -> float:
    return float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0


def summarize(outcomes, design, truth, pattern: str, m: float, power_mode: str = "normal") -> ScenarioSummary:
    """Collapse one cell's replicates into a :class:`ScenarioSummary`."""
    n_oracle = design.oracle_n(truth)
    n_final = _column(outcomes, "n_final_recorded").astype(float)
    reject = _column(outcomes, "reject").astype(float)
    trunc = _column(outcomes, "truncated").astype(float)
    blinded = _column(outcomes, "blinded_estimate").astype(float)
    sq = (n_final - n_oracle) ** 2
    pw = np.asarray(true_power(n_final, truth, design.alpha, power_mode, design.delta1))
    cst = sq / (100.0 * pw)
    mse_single, cost_single = single_stage_metrics(
        design.n_init, n_oracle, truth, design.alpha, power_mode, design.delta1)
    mse_ssr = float(sq.mean())
    if hasattr(outcomes, "n_delay") and not isinstance(outcomes, (list, tuple)):
        n_delay = float(outcomes.n_delay)
    else:
        n_delay = float(outcomes[0].n_delay)
    return ScenarioSummary(
        endpoint=design.endpoint, truth_param=float(truth.param), pattern=pattern, n1=design.n1,
        m=float(m), replicates=int(n_final.size),
        empirical_power=float(reject.mean()), avg_n_final=float(n_final.mean()),
        avg_blinded=float(blinded.mean()), n_oracle=n_oracle, n_delay=n_delay,
        mse_single=mse_single, mse_ssr=mse_ssr, rmse_ssr=math.sqrt(mse_ssr),
        cost_single=cost_single, cost_ssr=float(cst.mean()), delay_impact=float(trunc.mean()),
        se_power=_se(reject), se_avg_n_final=_se(n_final), se_mse_ssr=_se(sq),
        se_cost_ssr=_se(cst), se_delay_impact=_se(trunc),
    )
