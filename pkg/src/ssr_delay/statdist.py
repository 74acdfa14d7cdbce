"""Normal and central-t distribution functions, power approximations and the
pooled two-sample t-test."""
from __future__ import annotations

import math
from functools import lru_cache
from statistics import NormalDist

import numpy as np
from scipy.special import betainc, betaincinv, ndtr

_STD = NormalDist()
_SQRT2 = math.sqrt(2.0)

POWER_MODES = ("normal", "t")


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF, accurate to ~1e-16 absolute (uses ``erfc``)."""
    if math.isnan(x):
        raise ValueError("x must not be NaN")
    return 0.5 * math.erfc(-x / _SQRT2)


def std_normal_quantile(p: float) -> float:
    """Inverse standard normal CDF (Wichura's AS241 via ``statistics``)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p!r}")
    return _STD.inv_cdf(p)


def _t_cdf(t: float, df: float) -> float:
    x = df / (df + t * t)
    tail = 0.5 * float(betainc(0.5 * df, 0.5, x))
    return 1.0 - tail if t > 0 else tail


@lru_cache(maxsize=4096)
def central_t_quantile(p: float, df: float) -> float:
    """Quantile of the central t distribution with ``df`` degrees of freedom.

    Inverts the regularized incomplete beta function; if that route returns
    something unusable the answer is found by bisection on the CDF.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p!r}")
    if not df > 0:
        raise ValueError(f"df must be positive, got {df!r}")
    if p == 0.5:
        return 0.0
    tail = min(p, 1.0 - p)
    x = float(betaincinv(0.5 * df, 0.5, 2.0 * tail))
    t = math.sqrt(df * (1.0 - x) / x) if 0.0 < x <= 1.0 else math.nan
    if not math.isfinite(t) or abs(_t_cdf(t, df) - max(p, 1.0 - p)) > 1e-12:
        t = _bisect_t(max(p, 1.0 - p), df)
    return t if p > 0.5 else -t


def _bisect_t(p: float, df: float) -> float:
    lo, hi = 0.0, 1.0
    while _t_cdf(hi, df) < p:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _t_cdf(mid, df) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def t_critical(alpha: float, df) -> np.ndarray | float:
    """One-sided upper critical value(s) ``t_df(1 - alpha)``; ``df`` may be an array."""
    arr = np.asarray(df, dtype=float)
    if arr.ndim == 0:
        return central_t_quantile(1.0 - alpha, float(arr))
    uniq, inv = np.unique(arr, return_inverse=True)
    crit = np.array([central_t_quantile(1.0 - alpha, float(d)) for d in uniq])
    return crit[inv].reshape(arr.shape)


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def power_continuous(n_total, delta, sd, alpha, mode: str = "normal"):
    """Approximate power of the one-sided two-sample test with ``n_total/2`` per arm.

    ``mode="normal"`` uses the normal critical value, ``mode="t"`` swaps in the
    central-t critical value with ``n_total - 2`` degrees of freedom.
    """
    n = np.asarray(n_total, dtype=float)
    if mode == "normal":
        crit = std_normal_quantile(1.0 - alpha)
    elif mode == "t":
        if np.any(n <= 2):
            raise ValueError("t-mode power needs n_total > 2")
        crit = t_critical(alpha, n - 2.0)
    else:
        raise ValueError(f"unknown power mode {mode!r}; expected one of {POWER_MODES}")
    if sd == 0:
        shift = np.where(n > 0, math.copysign(math.inf, delta) if delta else 0.0, 0.0)
    else:
        shift = delta / (sd * np.sqrt(4.0 / n))
    return _scalar_or_array(ndtr(shift - crit))


def power_binary(n_total, p1, p2, alpha):
    """Normal-approximation power of the pooled-variance two-proportion test."""
    n = np.asarray(n_total, dtype=float)
    z = std_normal_quantile(1.0 - alpha)
    diff = p2 - p1
    pbar = 0.5 * (p1 + p2)
    crit = z * math.sqrt(pbar * (1.0 - pbar)) / np.sqrt(n / 4.0)
    spread = np.sqrt((p1 * (1.0 - p1) + p2 * (1.0 - p2)) * 2.0 / n)
    return _scalar_or_array(ndtr((diff - crit) / spread))


def t_statistic_from_moments(mean_e, mean_c, ss_e, ss_c, n_e, n_c):
    """Pooled-variance t statistic from per-arm means and sums of squared deviations.

    Zero pooled variance gives 0 when the means agree and ``±inf`` otherwise.
    """
    mean_e, mean_c = np.asarray(mean_e, float), np.asarray(mean_c, float)
    n_e, n_c = np.asarray(n_e, float), np.asarray(n_c, float)
    s2 = (np.asarray(ss_e, float) + np.asarray(ss_c, float)) / (n_e + n_c - 2.0)
    diff = mean_e - mean_c
    se = np.sqrt(s2 * (1.0 / n_e + 1.0 / n_c))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, diff / np.where(se > 0, se, 1.0), np.sign(diff) * np.inf)
    t = np.where((se == 0) & (diff == 0), 0.0, t)
    return _scalar_or_array(t)


def two_sample_t_test(ys_e, ys_c, alpha: float) -> tuple[float, bool]:
    """One-sided pooled two-sample t-test of ``mean(E) > mean(C)``.

    Returns ``(t_stat, reject)`` with rejection when ``t_stat`` reaches the
    ``1 - alpha`` quantile of t with ``n_E + n_C - 2`` df.
    """
    e = np.asarray(ys_e, dtype=float)
    c = np.asarray(ys_c, dtype=float)
    if e.size < 2 or c.size < 2:
        raise ValueError("each arm needs at least two observations")
    me, mc = e.mean(), c.mean()
    t = t_statistic_from_moments(me, mc, ((e - me) ** 2).sum(), ((c - mc) ** 2).sum(), e.size, c.size)
    crit = central_t_quantile(1.0 - alpha, float(e.size + c.size - 2))
    return t, bool(t >= crit)
