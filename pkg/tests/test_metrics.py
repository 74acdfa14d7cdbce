import math

import numpy as np
import pytest

from ssr_delay.design import reference_binary_design, reference_continuous_design
from ssr_delay.engine import OutcomeBatch, ReplicateOutcome, ScenarioTruth
from ssr_delay.metrics import (cost, delay_impact, empirical_power, mse, rmse,
                               single_stage_metrics, summarize, true_power)

N10 = 201.8794198210537


def outcomes(sizes, trunc, reject):
    return [ReplicateOutcome(10.0, s, 0, 25.0, s, int(2 * math.ceil(s / 2)), t, r, 0.0)
            for s, t, r in zip(sizes, trunc, reject)]


def test_basic_metrics_on_sequence():
    outs = outcomes([100.0, 200.0, 300.0], [True, False, False], [False, True, True])
    assert delay_impact(outs) == pytest.approx(1 / 3)
    assert empirical_power(outs) == pytest.approx(2 / 3)
    assert mse(outs, 200.0) == pytest.approx(20000 / 3)
    assert rmse(outs, 200.0) == pytest.approx(math.sqrt(20000 / 3))


def test_batch_and_sequence_agree():
    outs = outcomes([150.0, 210.5, 260.0, 98.0], [0, 1, 0, 1], [1, 1, 0, 0])
    batch = OutcomeBatch.concat([OutcomeBatch(
        blinded_estimate=np.array([o.blinded_estimate for o in outs]),
        n_star=np.array([o.n_star for o in outs]), n2_star=np.zeros(4, int), n_delay=25.0,
        n_final_recorded=np.array([o.n_final_recorded for o in outs]),
        n_final_generated=np.array([o.n_final_generated for o in outs]),
        truncated=np.array([o.truncated for o in outs]), reject=np.array([o.reject for o in outs]),
        test_stat=np.zeros(4))])
    truth = ScenarioTruth("continuous", 10.0, delta_truth=3.5)
    assert cost(batch, N10, truth, 0.05) == pytest.approx(cost(outs, N10, truth, 0.05))
    assert mse(batch, N10) == pytest.approx(mse(outs, N10))


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        mse([], 10.0)


def test_cost_single_replicate_frozen():
    # one replicate at N* = 171.82, sd 8: (171.82 - 129.20)^2 / (100 * power)
    truth = ScenarioTruth("continuous", 8.0, delta_truth=3.5)
    outs = outcomes([171.82], [True], [True])
    n8 = 129.20282868546
    expected = (171.82 - n8) ** 2 / (100 * true_power(171.82, truth, 0.05))
    assert cost(outs, n8, truth, 0.05) == pytest.approx(expected)


def test_single_stage_frozen():
    c = reference_continuous_design()
    for sd, want in ((8.0, 5281.8869), (12.0, 7890.2261)):
        t = ScenarioTruth("continuous", sd, delta_truth=3.5)
        assert single_stage_metrics(c.n_init, c.oracle_n(t), t, 0.05)[0] == pytest.approx(want, abs=1e-3)
    b = reference_binary_design()
    for p1, m_want, c_want in ((0.1, 767.70416, 8.457003), (0.3, 0.0, 0.0), (0.5, 15.664548, 0.192196)):
        t = ScenarioTruth("binary", pi1=p1, delta_truth=0.25)
        got = single_stage_metrics(b.n_init, b.oracle_n(t), t, 0.05)
        assert got[0] == pytest.approx(m_want, abs=1e-3)
        assert got[1] == pytest.approx(c_want, rel=1e-5, abs=1e-12)


def test_true_power_needs_effect():
    with pytest.raises(ValueError):
        true_power(100, ScenarioTruth("continuous", 10.0), 0.05)


def test_summarize_fields():
    c = reference_continuous_design()
    truth = ScenarioTruth("continuous", 10.0, delta_truth=3.5)
    outs = outcomes([200.0, 220.0], [False, True], [True, False])
    s = summarize(outs, c, truth, "uniform", 3)
    assert s.replicates == 2 and s.n_delay == 25.0
    assert s.avg_n_final == 210.0 and s.delay_impact == 0.5
    assert s.rmse_ssr == pytest.approx(math.sqrt(s.mse_ssr))
    assert s.se_power == pytest.approx(np.std([1, 0], ddof=1) / math.sqrt(2))
    assert set(s.as_dict()) >= {"cost_ssr", "se_cost_ssr"}
