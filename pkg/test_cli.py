#!/usr/bin/env python3
"""
Command-line tests: eval, validate, select and convergence through click's runner.
"""

import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from main import cli
from modules.datasets import load_dataset
from modules.sider import sider_curve


@pytest.fixture
def runner():
    return CliRunner()


def test_eval_sider2_dense_samples(runner, write_corpus, three_point, tmp_path):
    out = tmp_path / "curve.csv"
    result = runner.invoke(cli, ["eval", str(write_corpus(three_point)), "--method", "sider2", "--out", str(out)])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["t", "x", "y", "z"]
    assert len(frame) == 201
    points = frame[["x", "y", "z"]].to_numpy()
    assert np.allclose(points[0], three_point.points[0], atol=1e-12)
    assert np.allclose(points[-1], three_point.points[-1], atol=1e-12)


def test_eval_seno2_traces_selected_stencil(runner, write_corpus, tmp_path):
    knots = load_dataset("seno2_case_a").knots
    out = tmp_path / "seno2.csv"
    result = runner.invoke(cli, ["eval", str(write_corpus(knots)), "--method", "seno2", "--out", str(out)])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(out)
    central = frame[(frame["t"] >= knots.times[1]) & (frame["t"] <= knots.times[2])]
    expected = sider_curve(knots.window(0, 3), 2)(central["t"].to_numpy())
    assert np.allclose(central[["x", "y", "z"]].to_numpy(), expected, atol=1e-12)


def test_eval_json_with_velocity(runner, write_corpus, three_point, tmp_path):
    out = tmp_path / "curve.json"
    args = ["eval", str(write_corpus(three_point)), "--method", "slerp", "--density", "10",
            "--derivatives", "--format", "json", "--out", str(out)]
    assert runner.invoke(cli, args).exit_code == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 11
    assert {"t", "x", "y", "z", "dx", "dy", "dz"} == set(rows[0])


def test_malformed_row_is_parse_error(runner, write_corpus):
    path = write_corpus("t,x,y,z\n0,1,0,0\n0.5,abc,0,0\n1,0,1,0\n")
    assert runner.invoke(cli, ["eval", str(path)]).exit_code == 2


def test_missing_file_is_parse_error(runner, tmp_path):
    assert runner.invoke(cli, ["validate", str(tmp_path / "absent.csv")]).exit_code == 2


def test_unknown_method_is_usage_error(runner, write_corpus, three_point):
    assert runner.invoke(cli, ["eval", str(write_corpus(three_point)), "--method", "bezier"]).exit_code == 2


def test_ambiguous_pair_fails_validation(runner, write_corpus):
    path = write_corpus("t,x,y,z\n0,1,0,0\n1,0,1,0\n2,0,0.6,0.8\n")
    result = runner.invoke(cli, ["validate", str(path)])
    assert result.exit_code == 3
    assert "AMBIGUOUS" in result.output
    assert runner.invoke(cli, ["eval", str(path)]).exit_code == 3


def test_non_uniform_times_fail_validation(runner, write_corpus):
    path = write_corpus("t,x,y,z\n0,1,0,0\n0.5,0.8,0.6,0\n1.25,0.6,0.8,0\n")
    assert runner.invoke(cli, ["eval", str(path)]).exit_code == 3


def test_far_from_unit_row_fails_validation(runner, write_corpus):
    path = write_corpus("t,x,y,z\n0,1,0,0\n1,0.5,0.5,0\n")
    assert runner.invoke(cli, ["eval", str(path), "--method", "slerp"]).exit_code == 3


def test_validate_reports_flip(runner, write_corpus):
    path = write_corpus("t,x,y,z\n0,1,0,0\n1,-0.8,-0.6,0\n2,0.6,0.8,0\n")
    result = runner.invoke(cli, ["validate", str(path)])
    assert result.exit_code == 0, result.output
    assert "pair 0" in result.output and "flipped" in result.output


def test_select_central_interval(runner, write_corpus, tmp_path):
    dataset = load_dataset("seno2_case_b")
    out = tmp_path / "selection.csv"
    result = runner.invoke(cli, ["select", str(write_corpus(dataset.knots)), "--method", "seno2", "--out", str(out)])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(out)
    chosen = frame[(frame["interval"] == 1) & frame["selected"]]
    assert chosen["candidate_start"].tolist() == [dataset.expected_start]


def test_convergence_table_is_reproducible(runner, tmp_path):
    args = ["convergence", "--curve", "kinked", "--method", "slerp", "--method", "seno2",
            "--inv-dt-min", "16", "--inv-dt-max", "64"]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert runner.invoke(cli, args + ["--out", str(first)]).exit_code == 0
    assert runner.invoke(cli, args + ["--out", str(second)]).exit_code == 0
    assert first.read_bytes() == second.read_bytes()
    frame = pd.read_csv(first)
    assert list(frame.columns) == ["inv_dt", "e_slerp", "rho_slerp", "e_seno2", "rho_seno2"]
    assert frame["inv_dt"].tolist() == [16, 32, 64]


def test_recursion_cap_is_numerical_failure(runner, write_corpus, four_point, tmp_path):
    config = tmp_path / "capped.yaml"
    config.write_text("numerics:\n  max_sider_order: 2\n")
    args = ["--config", str(config), "eval", str(write_corpus(four_point)), "--method", "sider3"]
    assert runner.invoke(cli, args).exit_code == 4
    assert runner.invoke(cli, args[2:]).exit_code == 0
