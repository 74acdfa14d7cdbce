import csv
import io
import json
import subprocess
import sys

import pytest

from ssr_delay.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_oracle_continuous(capsys):
    code, out, _ = run(capsys, "oracle")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [round(float(r["n_total"]), 2) for r in rows] == [129.2, 201.88, 290.71]


def test_oracle_binary(capsys):
    code, out, _ = run(capsys, "oracle", "--endpoint", "binary")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [round(float(r["n_total"]), 3) for r in rows] == [66.872, 94.58, 90.622]


def test_pipeline(capsys):
    code, out, _ = run(capsys, "pipeline", "--pattern", "linear", "-m", "3", "24")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[0]["n_delay"]) == pytest.approx(23.6429, abs=1e-3)
    assert float(rows[1]["n_delay"]) == pytest.approx(358.722, abs=1e-3)


def test_simulate_writes_csv_and_json(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("design: {n1: 70}\ntruths: [{sd_truth: 8}]\ndelays_m: [0, 6]\nreplicates: 200\n")
    out = tmp_path / "res" / "run.csv"
    code, _, _ = run(capsys, "simulate", str(cfg), "--out", str(out), "--seed", "5")
    assert code == 0
    assert len(out.read_text().splitlines()) == 3
    doc = json.loads(out.with_suffix(".json").read_text())
    assert doc["meta"]["base_seed"] == 5


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("design: {n1: 70, colour: red}\ntruths: [{sd_truth: 8}]\n")
    code, _, err = run(capsys, "simulate", str(cfg))
    assert code == 2 and "design.colour" in err


def test_tables_small(capsys):
    code, out, _ = run(capsys, "tables", "S4", "--reps", "100")
    assert code == 0 and out.splitlines()[0].startswith("truth_param,empirical_power")


def test_figures_multi_n1(capsys):
    code, out, _ = run(capsys, "figures", "--metric", "rmse", "--n1", "50", "90",
                       "-m", "3", "--reps", "50")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert {r["n1"] for r in rows} == {"50", "90"}
    assert {r["pattern"] for r in rows} == {"uniform", "linear"}


def test_bad_workers(capsys):
    code, _, err = run(capsys, "tables", "S1", "--workers", "0")
    assert code == 2 and "workers" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ssr_delay", "oracle", "--sd", "10"],
                         capture_output=True, text=True, check=True)
    assert "201.879" in res.stdout
