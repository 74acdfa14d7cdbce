import csv
import io
import json

import numpy as np
import pytest

from ssr_delay import harness
from ssr_delay.design import reference_continuous_design
from ssr_delay.engine import ScenarioTruth
from ssr_delay.harness import ConfigError, ScenarioGrid, grid_from_dict, load_config

BASE = {"design": {"endpoint": "continuous", "n1": 70}, "truths": [{"sd_truth": 10}],
        "delays_m": [0, 12], "replicates": 300}


def test_grid_from_dict_defaults():
    g = grid_from_dict(BASE)
    assert g.design.n_init == pytest.approx(201.87942, abs=1e-4)
    assert g.truths[0].delta_truth == 3.5
    assert g.patterns == ["uniform"] and g.base_seed == 42


@pytest.mark.parametrize("mutate,field", [
    (lambda d: d.update(bogus=1), "bogus"),
    (lambda d: d["design"].update(n1=71), "design.n1"),
    (lambda d: d["design"].update(alpha="x"), "design.alpha"),
    (lambda d: d["design"].update(extra=2), "design.extra"),
    (lambda d: d.update(truths=[]), "truths"),
    (lambda d: d.update(patterns=["poisson"]), "patterns"),
    (lambda d: d.update(t1_mode="x"), "t1_mode"),
    (lambda d: d.update(replicates=0), "replicates"),
    (lambda d: d.update(delays_m=[-1]), "delays_m"),
    (lambda d: d["truths"][0].update(pi1=0.2), "truths[0]"),
])
def test_config_errors_name_field(mutate, field):
    data = json.loads(json.dumps(BASE))
    mutate(data)
    with pytest.raises(ConfigError, match=field.replace("[", r"\[").replace("]", r"\]")):
        grid_from_dict(data)


def test_binary_config_defaults(tmp_path):
    p = tmp_path / "b.yaml"
    p.write_text("design:\n  endpoint: binary\n  p1_init: 0.3\ntruths:\n  - {pi1: 0.1, delta_truth: 0.25}\n")
    g = load_config(p)
    assert g.design.n1 == 30 and g.design.n_init == pytest.approx(94.57966, abs=1e-4)
    assert g.truths[0].pi2 == pytest.approx(0.35)


def test_bad_yaml(tmp_path):
    p = tmp_path / "x.yaml"
    p.write_text("design: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(p)


def test_worker_count_and_blocking_do_not_change_results(monkeypatch):
    g = grid_from_dict(dict(BASE, replicates=500))
    one = harness.run_cells(g, 1)
    monkeypatch.setattr(harness, "BLOCK_SIZE", 64)
    many = harness.run_cells(g, 3)
    for key in one:
        assert list(one[key]) == list(many[key])


def test_prefix_of_replicates_is_stable():
    small = harness.run_cells(grid_from_dict(dict(BASE, replicates=50)))
    large = harness.run_cells(grid_from_dict(dict(BASE, replicates=2500)))
    for key in small:
        assert list(small[key]) == list(large[key])[:50]


def test_seed_changes_results():
    a = harness.run_cells(grid_from_dict(BASE))
    b = harness.run_cells(grid_from_dict(dict(BASE, base_seed=7)))
    key = next(iter(a))
    assert not np.array_equal(a[key].n_star, b[key].n_star)


def test_table_csv_layout():
    text = harness.reproduce_table("S3", replicates=200)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == harness.table_header("binary")
    assert len(rows) == 1 + 27
    assert rows[0][6] == "avg_p"


def test_unknown_table():
    with pytest.raises(ValueError):
        harness.table_grid("S9")


def test_summaries_json_round_trip():
    g = grid_from_dict(BASE)
    summaries = harness.run_grid(g)
    doc = json.loads(harness.summaries_json(summaries, {"base_seed": 42}))
    assert doc["meta"]["base_seed"] == 42
    assert len(doc["cells"]) == 2 and "se_power" in doc["cells"][0]
    text = harness.summaries_csv(summaries)
    assert text.splitlines()[0].split(",") == harness.SUMMARY_COLUMNS


@pytest.mark.parametrize("metric", harness.FIGURE_METRICS)
def test_figure_data(metric):
    g = grid_from_dict(dict(BASE, replicates=100, delays_m=[1, 2]))
    rows = list(csv.reader(io.StringIO(harness.emit_figure_data(g, metric))))
    expected = 1 + (200 if metric == "nstar-dist" else 2)
    assert len(rows) == expected


def test_with_n1_keeps_plan_size():
    g = harness.with_n1(grid_from_dict(BASE), 90)
    assert g.design.n1 == 90
    assert g.design.n_init == pytest.approx(reference_continuous_design().n_init)


def test_grid_validation_direct():
    with pytest.raises(ConfigError):
        ScenarioGrid(reference_continuous_design(), [ScenarioTruth("binary", pi1=0.1, delta_truth=0.2)])
    with pytest.raises(ConfigError):
        ScenarioGrid(reference_continuous_design(), [ScenarioTruth("continuous", 10.0)], cap=10)


def test_single_stage_table():
    rows = harness.single_stage_table(harness.table_grid("S1"))
    assert rows[1][1] == pytest.approx(0.0, abs=1e-9)
    assert rows[0][1] == pytest.approx(5281.8869, abs=1e-3)
