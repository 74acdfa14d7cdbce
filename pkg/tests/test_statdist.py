import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssr_delay.statdist import (central_t_quantile, power_binary, power_continuous,
                                std_normal_cdf, std_normal_quantile, t_critical,
                                t_statistic_from_moments, two_sample_t_test)

mpmath.mp.dps = 40


def mp_t_quantile(p, df):
    # independent route: invert the closed-form Student t CDF with mpmath's root finder
    df = mpmath.mpf(df)

    def cdf(t):
        x = df / (df + t * t)
        tail = mpmath.betainc(df / 2, mpmath.mpf(1) / 2, 0, x, regularized=True) / 2
        return 1 - tail if t > 0 else tail

    return float(mpmath.findroot(lambda t: cdf(t) - p, mpmath.sqrt(2) * mpmath.erfinv(2 * p - 1)))


# frozen from an mpmath computation at 40 digits
Z95 = 1.6448536269514722
Z80 = 0.8416212335729143


def test_normal_quantiles_match_frozen():
    assert std_normal_quantile(0.95) == pytest.approx(Z95, abs=1e-12)
    assert std_normal_quantile(0.8) == pytest.approx(Z80, abs=1e-12)
    assert std_normal_quantile(0.5) == 0.0


def test_normal_cdf_tails():
    assert std_normal_cdf(0.0) == 0.5
    assert std_normal_cdf(-40.0) == pytest.approx(float(mpmath.ncdf(-40)), rel=1e-10)
    assert std_normal_cdf(8.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        std_normal_cdf(float("nan"))


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_normal_quantile_domain(p):
    with pytest.raises(ValueError):
        std_normal_quantile(p)


@given(st.floats(min_value=1e-12, max_value=1 - 1e-12))
def test_normal_round_trip(p):
    assert std_normal_cdf(std_normal_quantile(p)) == pytest.approx(p, rel=1e-9, abs=1e-15)


@given(st.floats(-30, 30), st.floats(-30, 30))
def test_normal_cdf_monotone(a, b):
    lo, hi = sorted((a, b))
    assert std_normal_cdf(lo) <= std_normal_cdf(hi)


@pytest.mark.parametrize("p,df,expected", [
    (0.95, 200, 1.6525081),
    (0.95, 2, 2.9199856),
    (0.95, 1e6, 1.6448552),
])
def test_t_quantile_frozen(p, df, expected):
    assert central_t_quantile(p, df) == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("df", [1, 3, 7.5, 30, 138, 400, 5000])
@pytest.mark.parametrize("p", [0.6, 0.9, 0.95, 0.995])
def test_t_quantile_against_mpmath(p, df):
    assert central_t_quantile(p, df) == pytest.approx(mp_t_quantile(p, df), rel=1e-9)


def test_t_quantile_symmetry_and_limit():
    assert central_t_quantile(0.05, 40) == pytest.approx(-central_t_quantile(0.95, 40), abs=1e-12)
    assert central_t_quantile(0.5, 17) == pytest.approx(0.0, abs=1e-12)
    assert central_t_quantile(0.95, 1e9) == pytest.approx(Z95, abs=1e-6)


@given(st.floats(min_value=2.0, max_value=1e4))
@settings(max_examples=50)
def test_t_quantile_above_normal(df):
    assert central_t_quantile(0.95, df) >= Z95 - 1e-9


def test_t_critical_vectorised():
    dfs = np.array([68.0, 200.0, 68.0])
    out = t_critical(0.05, dfs)
    assert out.shape == (3,)
    assert out[0] == out[2] == central_t_quantile(0.95, 68.0)


def test_power_continuous_normal_frozen():
    assert power_continuous(201.87942, 3.5, 8.0, 0.05) == pytest.approx(0.928299, abs=1e-5)
    assert power_continuous(201.8794198, 3.5, 10.0, 0.05) == pytest.approx(0.8, abs=1e-6)


def test_power_t_mode_below_normal():
    n = 201.8794198
    pn = power_continuous(n, 3.5, 10.0, 0.05, mode="normal")
    pt = power_continuous(n, 3.5, 10.0, 0.05, mode="t")
    assert pt < pn
    with pytest.raises(ValueError):
        power_continuous(n, 3.5, 10.0, 0.05, mode="exact")


@given(st.floats(10, 2000), st.floats(10, 2000))
def test_power_monotone_in_n(a, b):
    lo, hi = sorted((a, b))
    assert power_continuous(lo, 3.5, 10, 0.05) <= power_continuous(hi, 3.5, 10, 0.05)


def test_power_binary_frozen():
    assert power_binary(94.5797, 0.1, 0.35, 0.05) == pytest.approx(0.907773, abs=1e-5)
    assert power_binary(94.5797, 0.5, 0.75, 0.05) == pytest.approx(0.815030, abs=1e-5)
    assert power_binary(94.5797, 0.3, 0.3, 0.05) == pytest.approx(0.05, abs=1e-12)


def test_t_statistic_zero_variance_conventions():
    assert t_statistic_from_moments(1.0, 1.0, 0.0, 0.0, 5, 5) == 0.0
    assert t_statistic_from_moments(2.0, 1.0, 0.0, 0.0, 5, 5) == math.inf
    assert t_statistic_from_moments(0.0, 1.0, 0.0, 0.0, 5, 5) == -math.inf


def test_two_sample_t_test_matches_scipy():
    from scipy import stats
    rs = np.random.default_rng(3)
    e, c = rs.normal(1, 2, 30), rs.normal(0, 2, 30)
    t, reject = two_sample_t_test(e, c, 0.05)
    ref = stats.ttest_ind(e, c, alternative="greater")
    assert t == pytest.approx(ref.statistic, rel=1e-12)
    assert reject == (ref.pvalue <= 0.05)
