"""Testing the command-line interface"""

import json
import os

import numpy as np
import pytest

from policy_thresholds import __version__
from policy_thresholds.constants import REPORTED_VARIABLES
from policy_thresholds.scenarios.emit import FIGURE_FILE

from .shared import (
    AD_SHOCK_SCENARIO,
    INFLATION_CALIBRATION_END,
    INFLATION_QUARTERLY_PATH,
    LABOR_CALIBRATION_END,
    LABOR_MONTHLY_PATH,
    OIL_SCENARIO,
)
from .support.assertions import assert_valid_json_output
from .util import assert_close, assert_equal, assert_exit_code, run_cli


@pytest.mark.cli
def test_version():
    """Test the version flag"""
    output = run_cli("--version")
    assert_exit_code(output, 0)
    assert_equal(output.stdout.strip(), __version__)


@pytest.mark.cli
def test_command_required():
    """Test running without a command"""
    assert_exit_code(run_cli(), 2)


@pytest.mark.cli
def test_calibrate_epop_level_json():
    """Test the level method prints a valid threshold"""
    output = run_cli("calibrate", "epop", "--end", LABOR_CALIBRATION_END, "--json")
    assert_exit_code(output, 0)

    data = assert_valid_json_output(output.stdout, "threshold.json")
    assert_equal(data["method"], "level_regression")
    assert_equal(data["johansen"]["inferred_rank"], 1)
    assert_close(data["point_estimate"], 78.35, 0.05)


@pytest.mark.cli
def test_calibrate_wage_difference_json():
    """Test the default wage method"""
    output = run_cli("calibrate", "wage", "--end", INFLATION_CALIBRATION_END, "--json")
    assert_exit_code(output, 0)

    data = assert_valid_json_output(output.stdout, "threshold.json")
    assert_equal(data["method"], "difference_regression")
    assert data["johansen"] is None
    assert_close(data["summary"]["p50"], data["point_estimate"], 1e-12)


@pytest.mark.cli
def test_calibrate_text_output():
    """Test the plain-text threshold report"""
    output = run_cli("calibrate", "epop", "--method", "difference", "--end", LABOR_CALIBRATION_END)
    assert_exit_code(output, 0)
    assert output.stdout.startswith("epop threshold (difference_regression):")
    assert "thresholds" in output.stdout


@pytest.mark.cli
@pytest.mark.parametrize(
    "args",
    [
        ["calibrate", "epop", "--method", "spline"],
        ["calibrate", "wage", "--pce-thresh", "-1"],
        ["calibrate", "wage", "--pce-thresh", "nan"],
        ["calibrate", "epop", "--end", "June 2012"],
        ["calibrate", "epop", "--lag-order", "0"],
        ["sim", "run", AD_SHOCK_SCENARIO, "--format", "pdf"],
        ["sim", "suite", "--threads", "0"],
        ["stats", "adf", LABOR_MONTHLY_PATH, "epop", "--spec", "quadratic"],
        ["stats", "adf", LABOR_MONTHLY_PATH, "epop", "--max-lags", "-1"],
        ["stats", "adf", LABOR_MONTHLY_PATH],
        ["stats", "johansen", LABOR_MONTHLY_PATH, "epop", "unrate", "--trend", "quadratic"],
        ["stats", "ols", LABOR_MONTHLY_PATH, "epop", "unrate", "--diff", "-1"],
    ],
)
def test_invalid_arguments(args):
    """Test malformed options are refused by the parser"""
    output = run_cli(*args)
    assert_exit_code(output, 2)
    assert "error" in output.stderr


@pytest.mark.cli
def test_stats_adf_json():
    """Test ADF output on the employment ratio in levels and in differences"""
    window = ("--end", LABOR_CALIBRATION_END, "--json")
    level = run_cli("stats", "adf", LABOR_MONTHLY_PATH, "epop", *window)
    assert_exit_code(level, 0)
    level_data = assert_valid_json_output(level.stdout, "adf.json")
    assert_equal(level_data["series"], "epop")
    assert not level_data["reject_at_5pct"]

    change = run_cli("stats", "adf", LABOR_MONTHLY_PATH, "epop", "--diff", *window)
    assert_exit_code(change, 0)
    assert assert_valid_json_output(change.stdout, "adf.json")["reject_at_5pct"]


@pytest.mark.cli
def test_stats_johansen():
    """Test the rank table"""
    output = run_cli(
        "stats",
        "johansen",
        LABOR_MONTHLY_PATH,
        "epop",
        "unrate",
        "--end",
        LABOR_CALIBRATION_END,
    )
    assert_exit_code(output, 0)
    assert "inferred rank: 1" in output.stdout


@pytest.mark.cli
def test_stats_ols_json():
    """Test the regression printed as JSON"""
    output = run_cli(
        "stats",
        "ols",
        LABOR_MONTHLY_PATH,
        "epop",
        "unrate",
        "--end",
        LABOR_CALIBRATION_END,
        "--json",
    )
    assert_exit_code(output, 0)
    data = json.loads(output.stdout)
    assert_equal(data["names"], ["const", "unrate"])
    assert data["coefficients"][1] < 0


@pytest.mark.cli
def test_stats_ols_differenced_json():
    """Test `--diff k` differences the response and the regressors before fitting"""
    window = ("--end", LABOR_CALIBRATION_END, "--json")
    arguments = ("stats", "ols", LABOR_MONTHLY_PATH, "epop", "unrate")
    levels = json.loads(run_cli(*arguments, *window).stdout)

    output = run_cli(*arguments, "--diff", "1", *window)
    assert_exit_code(output, 0)
    data = json.loads(output.stdout)
    assert_equal(data["names"], ["const", "unrate_diff"])
    assert_equal(data["n_obs"], levels["n_obs"] - 1)
    assert data["coefficients"][1] < 0


@pytest.mark.cli
def test_stats_johansen_trend_json():
    """Test the deterministic term option"""
    output = run_cli(
        "stats",
        "johansen",
        LABOR_MONTHLY_PATH,
        "epop",
        "unrate",
        "--trend",
        "none",
        "--end",
        LABOR_CALIBRATION_END,
        "--json",
    )
    assert_exit_code(output, 0)
    assert_equal(json.loads(output.stdout)["trend"], "none")


@pytest.mark.cli
def test_calibrate_documented_form():
    """Test the `--csv` input, the threshold option and the short method name"""
    output = run_cli(
        "calibrate",
        "epop",
        "--csv",
        LABOR_MONTHLY_PATH,
        "--unrate-thresh",
        "6.5",
        "--method",
        "diff",
        "--end",
        LABOR_CALIBRATION_END,
        "--json",
    )
    assert_exit_code(output, 0)
    data = assert_valid_json_output(output.stdout, "threshold.json")
    assert_equal(data["method"], "difference_regression")

    output = run_cli(
        "calibrate", "wage", "--csv", INFLATION_QUARTERLY_PATH, "--pce-thresh", "2.5", "--json"
    )
    assert_exit_code(output, 0)
    assert_valid_json_output(output.stdout, "threshold.json")


@pytest.mark.cli
@pytest.mark.parametrize("window", [(), ("--end", INFLATION_CALIBRATION_END)])
def test_calibrate_wage_level_refused(window):
    """Test the level method for wages exits with the validation code"""
    output = run_cli("calibrate", "wage", "--method", "level", *window)
    assert_exit_code(output, 2)
    assert "not cointegrated" in output.stderr



@pytest.mark.cli
def test_numerical_failure_exit_code(tmp_path):
    """Test a series too short for the test exits with the numerical code"""
    path = tmp_path / "short.csv"
    lines = ["date,x"]
    for index, value in enumerate(np.arange(15.0)):
        lines.append(f"{1990 + index // 4}Q{index % 4 + 1},{value}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    output = run_cli("stats", "adf", str(path), "x", "--max-lags", "4")
    assert_exit_code(output, 3)
    assert "Error:" in output.stderr


@pytest.mark.cli
def test_invalid_scenario_exit_code(tmp_path):
    """Test a scenario the schema refuses"""
    path = tmp_path / "bad.toml"
    path.write_text('name = "bad"\nstart = "2012Q3"\nhorizon = 2\n', encoding="utf-8")

    output = run_cli("sim", "run", str(path), "--out", str(tmp_path))
    assert_exit_code(output, 2)
    assert "Error:" in output.stderr


@pytest.mark.cli
def test_missing_input_exit_code(tmp_path):
    """Test an absent input file"""
    output = run_cli("sim", "run", str(tmp_path / "absent.toml"), "--out", str(tmp_path))
    assert_exit_code(output, 4)

    output = run_cli("stats", "describe", str(tmp_path / "absent.csv"))
    assert_exit_code(output, 4)


@pytest.mark.cli
def test_sim_run(tmp_path):
    """Test a scenario run writes its outputs and prints the comparison"""
    output = run_cli("sim", "run", AD_SHOCK_SCENARIO, "--out", str(tmp_path), "--json")
    assert_exit_code(output, 0)

    data = assert_valid_json_output(output.stdout, "comparison.json")
    assert_equal(data["variants"], ["baseline", "pce_thresh", "wage_thresh"])

    directory = tmp_path / "sim1_ad_shock"
    expected = {f"{name}.csv" for name in REPORTED_VARIABLES} | {FIGURE_FILE}
    assert_equal(set(os.listdir(directory)), expected)


@pytest.mark.cli
def test_sim_run_text_csv_only(tmp_path):
    """Test the text summary and the CSV-only format"""
    output = run_cli("sim", "run", AD_SHOCK_SCENARIO, "--out", str(tmp_path), "--format", "csv")
    assert_exit_code(output, 0)
    assert "liftoff" in output.stdout
    assert f"{len(REPORTED_VARIABLES)} files written" in output.stdout
    assert not os.path.exists(tmp_path / "sim1_ad_shock" / FIGURE_FILE)


@pytest.mark.cli
def test_sim_compare(tmp_path):
    """Test comparing two scenario files"""
    output = run_cli(
        "sim",
        "compare",
        OIL_SCENARIO,
        "--base",
        AD_SHOCK_SCENARIO,
        "--out",
        str(tmp_path),
        "--json",
    )
    assert_exit_code(output, 0)

    data = assert_valid_json_output(output.stdout, "comparison.json")
    assert_equal(
        data["variants"],
        ["sim1_ad_shock/baseline", "sim2_oil/pce_thresh", "sim2_oil/wage_thresh"],
    )
    assert os.path.isdir(tmp_path / "sim1_ad_shock_compare")


@pytest.mark.cli
def test_verbose_logs_to_stderr(tmp_path):
    """Test progress logging goes to stderr only"""
    output = run_cli(
        "--verbose", "sim", "run", AD_SHOCK_SCENARIO, "--out", str(tmp_path), "--json"
    )
    assert_exit_code(output, 0)
    assert "INFO policy_thresholds" in output.stderr
    json.loads(output.stdout)
