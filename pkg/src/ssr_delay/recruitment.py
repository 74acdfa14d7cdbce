"""Expected pipeline counts under uniform or linearly increasing accrual.

Both patterns are calibrated so that the planned ``n_init`` participants are
recruited over ``horizon_t`` months. Counts are expected values and stay
real-valued.

Linear accrual needs the time ``t1`` at which the stage-1 cohort is complete.
Two fits are offered:

* ``"paper-text"`` solves ``gamma * t1 * (t1 + 1) / 2 = n1``;
* ``"table-compatible"`` solves it for ``n1 / 2``, which is what the
  published linear-recruitment pipeline columns correspond to.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

PATTERNS = ("uniform", "linear")
T1_MODES = ("paper-text", "table-compatible")


def uniform_rate(n_init: float, horizon_t: float) -> float:
    if n_init <= 0 or horizon_t <= 0:
        raise ValueError("n_init and horizon_t must be positive")
    return n_init / horizon_t


def pipeline_uniform(m, rate: float):
    """Expected arrivals during a delay of ``m`` months at a constant rate."""
    if np.any(np.asarray(m) < 0):
        raise ValueError("delay m must be non-negative")
    return m * rate


def linear_gamma(n_init: float, horizon_t: float) -> float:
    """Slope of the recruitment rate so that ``gamma * t(t+1)/2 = n_init``."""
    return 2.0 * n_init / (horizon_t * (horizon_t + 1.0))


def linear_t1(n1_fit: float, gamma: float) -> float:
    """Positive root of ``gamma * t1 * (t1 + 1) / 2 = n1_fit``."""
    if n1_fit < 0 or gamma <= 0:
        raise ValueError("n1_fit must be non-negative and gamma positive")
    return 0.5 * (math.sqrt(1.0 + 8.0 * n1_fit / gamma) - 1.0)


def pipeline_linear(m, gamma: float, t1: float):
    """Arrivals in months ``t1+1 .. t1+m``: ``gamma*m*t1 + gamma*m*(m+1)/2``."""
    if np.any(np.asarray(m) < 0):
        raise ValueError("delay m must be non-negative")
    return gamma * m * t1 + gamma * m * (m + 1) / 2.0


@dataclass(frozen=True)
class RecruitmentPlan:
    """Fitted accrual model for one design.

    Build with :meth:`fit`; ``n_delay(m)`` then gives the pipeline count.
    """

    pattern: str
    horizon_t: float
    n_init: float
    n1: int
    t1_mode: str = "table-compatible"
    rate_lambda: float = field(init=False)
    gamma: float = field(init=False)
    t1: float = field(init=False)

    def __post_init__(self):
        if self.pattern not in PATTERNS:
            raise ValueError(f"pattern must be one of {PATTERNS}, got {self.pattern!r}")
        if self.t1_mode not in T1_MODES:
            raise ValueError(f"t1_mode must be one of {T1_MODES}, got {self.t1_mode!r}")
        if not self.horizon_t > 0:
            raise ValueError("horizon_t must be positive")
        gamma = linear_gamma(self.n_init, self.horizon_t)
        n1_fit = self.n1 if self.t1_mode == "paper-text" else self.n1 / 2.0
        object.__setattr__(self, "rate_lambda", uniform_rate(self.n_init, self.horizon_t))
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "t1", linear_t1(n1_fit, gamma))

    @classmethod
    def fit(cls, design, pattern: str, horizon_t: float = 24.0, t1_mode: str = "table-compatible"):
        return cls(pattern, horizon_t, design.n_init, design.n1, t1_mode)

    def n_delay(self, m):
        if self.pattern == "uniform":
            return pipeline_uniform(m, self.rate_lambda)
        return pipeline_linear(m, self.gamma, self.t1)
