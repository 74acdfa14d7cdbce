"""Planning-stage and re-estimation sample size calculators.

All sizes are totals across both arms under 1:1 allocation and are returned
unrounded; rounding to an even integer happens only when data are generated.

Continuous designs are parameterised by the outcome standard deviation. The
scenario labels 8, 10 and 12 used in the published tables reproduce their
oracle sizes (129.20, 201.88, 290.71) only when read as SDs, so that is the
convention used throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .statdist import std_normal_quantile

ENDPOINTS = ("continuous", "binary")


def _z_sum(alpha: float, beta: float) -> float:
    return std_normal_quantile(1.0 - alpha) + std_normal_quantile(1.0 - beta)


def required_n_continuous(sd: float, delta: float, alpha: float, beta: float) -> float:
    """Total size ``4 sd^2 (z_{1-alpha} + z_{1-beta})^2 / delta^2``."""
    if sd < 0:
        raise ValueError("sd must be non-negative")
    if delta == 0:
        raise ValueError("delta must be non-zero")
    return 4.0 * sd * sd * _z_sum(alpha, beta) ** 2 / (delta * delta)


def required_n_binary(p1: float, p2: float, alpha: float, beta: float) -> float:
    """Total size for the two-proportion test with pooled null variance."""
    for name, p in (("p1", p1), ("p2", p2)):
        if not 0.0 < p < 1.0:
            raise ValueError(f"{name} must lie strictly between 0 and 1, got {p!r}")
    if p1 == p2:
        raise ValueError("p1 and p2 must differ")
    pbar = 0.5 * (p1 + p2)
    za = std_normal_quantile(1.0 - alpha)
    zb = std_normal_quantile(1.0 - beta)
    root = za * math.sqrt(2.0 * pbar * (1.0 - pbar)) + zb * math.sqrt(p1 * (1 - p1) + p2 * (1 - p2))
    return 2.0 * root * root / (p2 - p1) ** 2


def reestimate_n_continuous(sd_est, delta: float, alpha: float, beta: float):
    """Re-estimated total size from a blinded SD estimate (scalar or array)."""
    return 4.0 * sd_est * sd_est * _z_sum(alpha, beta) ** 2 / (delta * delta)


def reestimate_n_binary(p_pooled, delta1: float, alpha: float, beta: float):
    """Re-estimated total size from the blinded pooled success rate.

    Depends on the data only through ``p_pooled``; largest at 0.5.
    """
    return 2.0 * _z_sum(alpha, beta) ** 2 / (delta1 * delta1) * 2.0 * p_pooled * (1.0 - p_pooled)


def ceil_to_even(x: float) -> int:
    """Smallest even integer not below ``x``."""
    if x < 0:
        raise ValueError("x must be non-negative")
    c = math.ceil(x)
    return c + c % 2


@dataclass(frozen=True)
class DesignSpec:
    """Planning assumptions for a two-arm SSR trial.

    ``delta1`` is the single effect parameter (mean difference, or ``p2 - p1``).
    For binary designs ``p2_init`` defaults to ``p1_init + delta1``.
    """

    endpoint: str = "continuous"
    alpha: float = 0.05
    beta: float = 0.2
    delta1: float = 3.5
    sd_init: float | None = 10.0
    p1_init: float | None = None
    p2_init: float | None = None
    n1: int = 70
    n_init: float = field(init=False)

    def __post_init__(self):
        if self.endpoint not in ENDPOINTS:
            raise ValueError(f"endpoint must be one of {ENDPOINTS}, got {self.endpoint!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta!r}")
        if not self.delta1 > 0:
            raise ValueError(f"delta1 must be positive, got {self.delta1!r}")
        if int(self.n1) != self.n1 or self.n1 < 4 or self.n1 % 2:
            raise ValueError(f"n1 must be an even integer >= 4, got {self.n1!r}")
        if self.endpoint == "continuous":
            if self.sd_init is None or self.sd_init <= 0:
                raise ValueError("continuous designs need a positive sd_init")
            n_init = required_n_continuous(self.sd_init, self.delta1, self.alpha, self.beta)
        else:
            if self.p1_init is None:
                raise ValueError("binary designs need p1_init")
            if self.p2_init is None:
                object.__setattr__(self, "p2_init", self.p1_init + self.delta1)
            n_init = required_n_binary(self.p1_init, self.p2_init, self.alpha, self.beta)
        object.__setattr__(self, "n1", int(self.n1))
        object.__setattr__(self, "n_init", n_init)

    def oracle_n(self, truth) -> float:
        """Size the planning formula gives when the true nuisance values are plugged in."""
        if self.endpoint == "continuous":
            return required_n_continuous(truth.sd_truth, self.delta1, self.alpha, self.beta)
        return required_n_binary(truth.pi1, truth.pi2, self.alpha, self.beta)

    def reestimate(self, blinded_estimate):
        if self.endpoint == "continuous":
            return reestimate_n_continuous(blinded_estimate, self.delta1, self.alpha, self.beta)
        return reestimate_n_binary(blinded_estimate, self.delta1, self.alpha, self.beta)


def reference_continuous_design(n1: int = 70) -> DesignSpec:
    return DesignSpec("continuous", 0.05, 0.2, 3.5, sd_init=10.0, n1=n1)


def reference_binary_design(n1: int = 30) -> DesignSpec:
    return DesignSpec("binary", 0.05, 0.2, 0.25, sd_init=None, p1_init=0.3, p2_init=0.55, n1=n1)
