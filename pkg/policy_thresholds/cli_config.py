"""Module for the command-line arguments"""

import argparse
import math
from typing import List, Optional

from . import __version__
from .calibration import CalibrationMethod
from .constants import (
    DEFAULT_DATE_COLUMN,
    DEFAULT_JOHANSEN_LAG_ORDER,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_PCE_THRESH,
    DEFAULT_UNRATE_THRESH,
    INFLATION_QUARTERLY_PATH,
    LABOR_MONTHLY_PATH,
    SUITE_MANIFEST_PATH,
)
from .econometrics import AdfSpec, JohansenTrend
from .scenarios.emit import OutputFormat
from .series_store import parse_period
from .util import PolicyThresholdsException

OUTPUT_FORMATS = ", ".join(member.value for member in OutputFormat)
METHODS = {
    "diff": CalibrationMethod.DIFFERENCE,
    "difference": CalibrationMethod.DIFFERENCE,
    "level": CalibrationMethod.LEVEL,
}
METHOD_NAMES = ", ".join(METHODS)


def _parse_period(text: str) -> str:
    """Validate a `YYYY-MM` or `YYYYQn` window bound"""
    try:
        parse_period(text)
    except PolicyThresholdsException as error:
        raise argparse.ArgumentTypeError(
            f"Invalid period: {text}. Expected YYYY-MM or YYYYQn"
        ) from error
    return text


def _parse_format(option: str) -> OutputFormat:
    """Parse output format option."""
    try:
        return OutputFormat(option.lower())
    except ValueError as error:
        raise argparse.ArgumentTypeError(
            f"Invalid --format option: {option}. Valid options: {OUTPUT_FORMATS}"
        ) from error


def _parse_method(option: str) -> CalibrationMethod:
    """Parse calibration method option."""
    if option.lower() in METHODS:
        return METHODS[option.lower()]
    raise argparse.ArgumentTypeError(
        f"Invalid --method option: {option}. Valid options: {METHOD_NAMES}"
    )


def _parse_adf_spec(option: str) -> AdfSpec:
    """Parse ADF deterministic terms option."""
    try:
        return AdfSpec.parse(option)
    except PolicyThresholdsException as error:
        raise argparse.ArgumentTypeError(error.message) from error


def _parse_johansen_trend(option: str) -> JohansenTrend:
    """Parse Johansen deterministic term option."""
    try:
        return JohansenTrend.parse(option)
    except PolicyThresholdsException as error:
        raise argparse.ArgumentTypeError(error.message) from error


def _parse_threshold(text: str) -> float:
    """Parse a positive threshold"""
    try:
        value = float(text)
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"A threshold must be a number; got: {text}") from error
    if not math.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"A threshold must be positive; got: {text}")
    return value


class NonNegativeAction(argparse.Action):
    """
    Action for parsing the non negative int argument.
    """

    def __call__(self, parser, namespace, values, option_string=None):
        error_msg = f"argument {option_string} must be a non-negative integer; got: {values}."
        try:
            value = int(values)
        except ValueError:
            parser.error(error_msg)

        if value < 0:
            parser.error(error_msg)

        setattr(namespace, self.dest, value)


class PositiveAction(argparse.Action):
    """
    Action for parsing positive int argument;
    """

    def __call__(self, parser, namespace, values, option_string=None):
        error_msg = f"argument {option_string} must be a positive integer; got: {values}."
        try:
            value = int(values)
        except ValueError:
            parser.error(error_msg)

        if value <= 0:
            parser.error(error_msg)

        setattr(namespace, self.dest, value)


def _add_json(parser: argparse.ArgumentParser):
    parser.add_argument("--json", action="store_true", help="Print the result as JSON")


def _add_data(parser: argparse.ArgumentParser, default: Optional[str] = None):
    """CSV input with an optional period window"""
    if default is None:
        parser.add_argument("csv", help="Path to the input CSV file")
    else:
        parser.add_argument(
            "--csv",
            "--data",
            dest="csv",
            default=default,
            help="Path to the input CSV file; defaults to the bundled panel",
        )
    parser.add_argument(
        "--start", type=_parse_period, help="First period used (YYYY-MM or YYYYQn)"
    )
    parser.add_argument("--end", type=_parse_period, help="Last period used (YYYY-MM or YYYYQn)")
    parser.add_argument(
        "--date-column",
        default=DEFAULT_DATE_COLUMN,
        help=f"Name of the date column; defaults to {DEFAULT_DATE_COLUMN}",
    )
    _add_json(parser)


def _add_output(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--out",
        default=DEFAULT_OUTPUT_DIR,
        help=f"Directory the outputs are written to; defaults to {DEFAULT_OUTPUT_DIR}",
    )
    parser.add_argument(
        "--format",
        dest="output_format",
        type=_parse_format,
        default=OutputFormat.BOTH,
        help=f"What to write: {OUTPUT_FORMATS}; defaults to both",
    )
    _add_json(parser)


def _add_lag_order(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--lag-order",
        action=PositiveAction,
        default=DEFAULT_JOHANSEN_LAG_ORDER,
        help=f"VAR order in levels of the Johansen test; defaults to {DEFAULT_JOHANSEN_LAG_ORDER}",
    )


def _sim_parser(subparsers):
    sim = subparsers.add_parser("sim", help="Run policy scenarios")
    commands = sim.add_subparsers(dest="action", metavar="ACTION")
    commands.required = True

    run = commands.add_parser("run", help="Run every variant of one scenario file")
    run.add_argument("scenario", help="Path to the scenario TOML file")
    _add_output(run)

    compare = commands.add_parser("compare", help="Compare scenario files against a base")
    compare.add_argument("scenarios", nargs="+", help="Scenario TOML files to compare")
    compare.add_argument(
        "--base", required=True, help="Scenario TOML file whose first variant is the reference"
    )
    _add_output(compare)

    suite = commands.add_parser("suite", help="Run every scenario of a manifest")
    suite.add_argument(
        "manifest",
        nargs="?",
        default=SUITE_MANIFEST_PATH,
        help="Path to the suite manifest; defaults to the bundled figure suite",
    )
    suite.add_argument(
        "--threads",
        action=PositiveAction,
        help="Number of scenarios run in parallel; defaults to SIM_THREADS or min(4, CPUs)",
    )
    _add_output(suite)


def _calibrate_parser(subparsers):
    calibrate = subparsers.add_parser("calibrate", help="Calibrate policy thresholds")
    commands = calibrate.add_subparsers(dest="action", metavar="ACTION")
    commands.required = True

    epop = commands.add_parser("epop", help="Employment-to-population threshold")
    _add_data(epop, LABOR_MONTHLY_PATH)
    epop.add_argument(
        "--method",
        type=_parse_method,
        default=CalibrationMethod.LEVEL,
        help=f"Calibration method: {METHOD_NAMES}; defaults to level",
    )
    epop.add_argument(
        "--unrate-thresh",
        type=_parse_threshold,
        default=DEFAULT_UNRATE_THRESH,
        help=f"Unemployment threshold; defaults to {DEFAULT_UNRATE_THRESH}",
    )
    _add_lag_order(epop)

    wage = commands.add_parser("wage", help="ECI wage-growth threshold")
    _add_data(wage, INFLATION_QUARTERLY_PATH)
    wage.add_argument(
        "--method",
        type=_parse_method,
        default=CalibrationMethod.DIFFERENCE,
        help=f"Calibration method: {METHOD_NAMES}; defaults to difference",
    )
    wage.add_argument(
        "--pce-thresh",
        type=_parse_threshold,
        default=DEFAULT_PCE_THRESH,
        help=f"PCE inflation threshold; defaults to {DEFAULT_PCE_THRESH}",
    )

    phillips = commands.add_parser("phillips", help="Price and wage Phillips curves")
    _add_data(phillips, INFLATION_QUARTERLY_PATH)

    passthrough = commands.add_parser("passthrough", help="Wage-to-price pass-through")
    _add_data(passthrough, INFLATION_QUARTERLY_PATH)

    var = commands.add_parser("var", help="Fit the expectations VAR")
    _add_data(var, INFLATION_QUARTERLY_PATH)
    var.add_argument(
        "--lags", action=PositiveAction, default=1, help="Number of VAR lags; defaults to 1"
    )
    var.add_argument("--save", help="Write the fitted coefficients to this JSON file")


def _add_diff(parser: argparse.ArgumentParser, what: str):
    parser.add_argument(
        "--diff",
        action=NonNegativeAction,
        nargs="?",
        const=1,
        default=0,
        metavar="K",
        help=f"Difference {what} at lag K first; K defaults to 1 when omitted",
    )


def _stats_parser(subparsers):
    stats = subparsers.add_parser("stats", help="Statistical tests on a CSV panel")
    commands = stats.add_subparsers(dest="action", metavar="ACTION")
    commands.required = True

    adf = commands.add_parser("adf", help="Augmented Dickey-Fuller test")
    _add_data(adf)
    adf.add_argument("column", help="Column to test")
    _add_diff(adf, "the column")
    adf.add_argument(
        "--max-lags",
        action=NonNegativeAction,
        help="Largest lag order searched by AIC; defaults to Schwert's rule",
    )
    adf.add_argument(
        "--spec",
        type=_parse_adf_spec,
        default=AdfSpec.CONSTANT,
        help="Deterministic terms: constant, constant+trend, none; defaults to constant",
    )

    johansen = commands.add_parser("johansen", help="Johansen cointegration test")
    _add_data(johansen)
    johansen.add_argument("columns", nargs="+", help="Columns to test")
    _add_lag_order(johansen)
    johansen.add_argument(
        "--trend",
        type=_parse_johansen_trend,
        default=JohansenTrend.CONSTANT,
        help="Deterministic term: none, constant, trend; defaults to constant",
    )

    for name, description in (
        ("ols", "Ordinary least squares"),
        ("diagnostics", "Harvey-Collier and White tests of an OLS fit"),
    ):
        regression = commands.add_parser(name, help=description)
        _add_data(regression)
        regression.add_argument("y", help="Response column")
        regression.add_argument("x", nargs="+", help="Regressor columns")
        _add_diff(regression, "every column")
        regression.add_argument(
            "--no-intercept", action="store_true", help="Fit without a constant"
        )

    decompose = commands.add_parser("decompose", help="Classical additive decomposition")
    _add_data(decompose)
    decompose.add_argument("column", help="Column to decompose")
    decompose.add_argument(
        "--period",
        action=PositiveAction,
        help="Seasonal period; defaults to the sampling frequency (12 or 4)",
    )

    corr = commands.add_parser("corr", help="Correlation matrix")
    _add_data(corr)
    corr.add_argument("columns", nargs="*", help="Columns used; defaults to all")

    describe = commands.add_parser("describe", help="Descriptive statistics")
    _add_data(describe)
    describe.add_argument("columns", nargs="*", help="Columns described; defaults to all")


def parse_args(raw_args: List[str]):
    """
    Parses CLI arguments.
    """
    parser = argparse.ArgumentParser(
        prog="policy-thresholds",
        description="Calibrate monetary-policy thresholds and simulate forward guidance",
    )
    parser.add_argument(
        "-v",
        "--version",
        help="Print the version",
        action="version",
        version=__version__,
    )
    parser.add_argument(
        "--verbose",
        action="count",
        default=0,
        help="Log progress to stderr; repeat for debug output",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    _sim_parser(subparsers)
    _calibrate_parser(subparsers)
    _stats_parser(subparsers)

    return parser.parse_args(raw_args)
