"""
Command-line entry point.
"""

import json
import logging.config
import os
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .calibration import (
    CalibrationMethod,
    ThresholdEstimate,
    calibrate_epop_threshold,
    calibrate_epop_threshold_level,
    calibrate_wage_threshold,
    calibrate_wage_threshold_level,
    fit_var_expectations,
    phillips_regressions,
    wage_passthrough_regression,
)
from .cli_config import parse_args
from .econometrics import (
    Description,
    RegressionResult,
    additive_decompose,
    adf_test,
    correlation_matrix,
    describe,
    johansen_test,
    ols,
    regression_diagnostics,
)
from .macro_model import save_var_expectations
from .scenarios.config import load_scenario
from .scenarios.emit import emit, summary
from .scenarios.runner import compare_scenarios, run, run_suite
from .series_store import Panel, TimeSeries, diff, format_period, load_panel
from .structures import (
    adf_dict,
    comparison_dict,
    correlation_dict,
    decomposition_dict,
    description_dict,
    diagnostics_dict,
    johansen_dict,
    phillips_dict,
    regression_dict,
    suite_dict,
    threshold_dict,
    var_dict,
)
from .util import PolicyThresholdsException

LOG_LEVELS = ("WARNING", "INFO", "DEBUG")


def configure_logging(verbosity: int):
    """Send package logs to stderr; more detail with every --verbose"""
    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                "plain": {"format": "%(levelname)s %(name)s: %(message)s"},
            },
            "handlers": {
                "error_console": {
                    "class": "logging.StreamHandler",
                    "formatter": "plain",
                    "stream": "ext://sys.stderr",
                },
            },
            "loggers": {
                "policy_thresholds": {
                    "level": LOG_LEVELS[min(verbosity, len(LOG_LEVELS) - 1)],
                    "handlers": ["error_console"],
                    "propagate": False,
                },
            },
        }
    )


def _print_json(data):
    print(json.dumps(data, indent=2))


def _load(args, columns: Optional[Sequence[str]] = None) -> Panel:
    return load_panel(args.csv, columns, args.date_column, args.start, args.end)


def _format_regression(result: RegressionResult) -> str:
    lines = [
        f"{result.response}: n={result.n_obs} R2={result.r2:.4f} adj R2={result.adj_r2:.4f}",
        f"{'':<14}{'coef':>12}{'std err':>12}{'t':>10}{'p':>10}",
    ]
    for index, name in enumerate(result.names):
        lines.append(
            f"{name:<14}{result.coefficients[index]:>12.4f}{result.std_errors[index]:>12.4f}"
            f"{result.t_stats[index]:>10.3f}{result.p_values[index]:>10.4f}"
        )
    return "\n".join(lines)


def _format_description(name: str, description: Description) -> str:
    return (
        f"{name:<14}{description.n:>6}{description.mean:>10.4f}{description.sd:>10.4f}"
        f"{description.min:>10.4f}{description.p25:>10.4f}{description.p50:>10.4f}"
        f"{description.p75:>10.4f}{description.max:>10.4f}"
    )


DESCRIPTION_HEADER = (
    f"{'':<14}{'n':>6}{'mean':>10}{'sd':>10}{'min':>10}"
    f"{'p25':>10}{'p50':>10}{'p75':>10}{'max':>10}"
)


def _print_estimate(label: str, estimate: ThresholdEstimate, json_output: bool):
    if json_output:
        _print_json(threshold_dict(estimate))
        return
    print(f"{label} threshold ({estimate.method.value}): {estimate.point_estimate:.4f}")
    print(_format_regression(estimate.regression))
    print(DESCRIPTION_HEADER)
    print(_format_description("thresholds", estimate.summary))


def _emit_and_print(result, directory: str, args):
    written = emit(result, directory, args.output_format)
    if args.json:
        _print_json(comparison_dict(result))
    else:
        print(summary(result))
        print(f"\n{len(written)} files written to {directory}")


def sim_run(args):
    """sim run"""
    scenario = load_scenario(args.scenario)
    _emit_and_print(run(scenario), os.path.join(args.out, scenario.name), args)


def sim_compare(args):
    """sim compare"""
    base = load_scenario(args.base)
    others = [load_scenario(path) for path in args.scenarios]
    result = compare_scenarios(base, others)
    _emit_and_print(result, os.path.join(args.out, f"{base.name}_compare"), args)


def sim_suite(args):
    """sim suite; outputs are written in manifest order once every scenario is done"""
    results = run_suite(args.manifest, threads=args.threads)
    for entry in results:
        emit(entry.result, os.path.join(args.out, entry.scenario.name), args.output_format)

    if args.json:
        _print_json(suite_dict(results))
        return
    for entry in results:
        print(f"[{entry.number}] {summary(entry.result)}\n")
    print(f"{len(results)} scenarios written to {args.out}")


def calibrate_epop(args):
    """calibrate epop"""
    panel = _load(args, ["epop", "unrate"])
    if args.method is CalibrationMethod.LEVEL:
        estimate = calibrate_epop_threshold_level(
            panel["epop"], panel["unrate"], args.unrate_thresh, args.lag_order
        )
    else:
        estimate = calibrate_epop_threshold(panel["epop"], panel["unrate"], args.unrate_thresh)
    _print_estimate("epop", estimate, args.json)


def calibrate_wage(args):
    """calibrate wage"""
    panel = _load(args, ["eciwg_rate", "pce_rate"])
    if args.method is CalibrationMethod.LEVEL:
        calibrate_wage_threshold_level(panel["eciwg_rate"], panel["pce_rate"])
    estimate = calibrate_wage_threshold(panel["eciwg_rate"], panel["pce_rate"], args.pce_thresh)
    _print_estimate("eciwg_rate", estimate, args.json)


def calibrate_phillips(args):
    """calibrate phillips"""
    curves = phillips_regressions(_load(args, ["pce_rate", "eciwg_rate", "unrate_gap"]))
    if args.json:
        _print_json(phillips_dict(curves))
        return
    print(_format_regression(curves.price))
    print()
    print(_format_regression(curves.wage))


def calibrate_passthrough(args):
    """calibrate passthrough"""
    panel = _load(args, ["pce_rate", "eciwg_rate"])
    result = wage_passthrough_regression(panel["pce_rate"], panel["eciwg_rate"])
    if args.json:
        _print_json(regression_dict(result))
        return
    print(_format_regression(result))


def calibrate_var(args):
    """calibrate var"""
    panel = _load(args, ["pce_rate", "ffr", "output_gap"])
    expectations = fit_var_expectations(panel, args.lags)
    if args.save:
        window = f"{format_period(panel.start)}-{format_period(panel.columns[0].end)}"
        save_var_expectations(
            expectations, args.save, note=f"fitted to {os.path.basename(args.csv)} {window}"
        )
    if args.json:
        _print_json(var_dict(expectations))
        return
    for lag, matrix in enumerate(expectations.coeffs, start=expectations.first_lag):
        print(f"lag {lag}")
        for name, row in zip(("pi", "r", "x"), matrix):
            print(f"  {name:<3}" + "".join(f"{value:>10.4f}" for value in row))
    print(f"spectral radius {expectations.spectral_radius():.4f}")


def stats_adf(args):
    """stats adf"""
    series = _load(args, [args.column])[args.column]
    if args.diff:
        series = diff(series, args.diff)
    result = adf_test(series, args.max_lags, args.spec)
    if args.json:
        _print_json(adf_dict(series.name, result))
        return
    verdict = "rejected" if result.reject_at_5pct else "not rejected"
    print(
        f"{series.name}: ADF {result.statistic:.4f}, p={result.p_value:.4f}, "
        f"lags={result.lags}, n={result.n_obs}; unit root {verdict} at 5%"
    )


def stats_johansen(args):
    """stats johansen"""
    result = johansen_test(_load(args, args.columns), args.lag_order, args.trend)
    if args.json:
        _print_json(johansen_dict(result))
        return
    print(f"{'rank':<6}{'trace':>12}{'5% cv':>12}{'max-eig':>12}{'5% cv':>12}")
    for rank, values in enumerate(
        zip(
            result.trace_stats,
            result.crit_5pct_trace,
            result.max_eigen_stats,
            result.crit_5pct_maxeig,
        )
    ):
        print(f"r<={rank:<3}" + "".join(f"{value:>12.4f}" for value in values))
    print(f"deterministic term: {result.trend.name.lower()}")
    print(f"inferred rank: {result.inferred_rank}")


def _regression(args) -> Tuple[RegressionResult, TimeSeries, Panel]:
    panel = _load(args, [args.y, *args.x])
    y, regressors = panel[args.y], panel.select(args.x)
    if args.diff:
        y = diff(y, args.diff)
        regressors = Panel(tuple(diff(column, args.diff) for column in regressors.columns))
    return ols(y, regressors, intercept=not args.no_intercept), y, regressors


def stats_ols(args):
    """stats ols"""
    result, _, _ = _regression(args)
    if args.json:
        _print_json(regression_dict(result))
        return
    print(_format_regression(result))


def stats_diagnostics(args):
    """stats diagnostics"""
    result, y, regressors = _regression(args)
    diagnostics = regression_diagnostics(result, y, regressors)
    if args.json:
        _print_json(diagnostics_dict(diagnostics))
        return
    print(
        f"Harvey-Collier t={diagnostics.harvey_collier.statistic:.4f} "
        f"p={diagnostics.harvey_collier.p_value:.4f}"
    )
    print(
        f"White LM={diagnostics.white.lm_statistic:.4f} p={diagnostics.white.lm_p_value:.4f}, "
        f"F={diagnostics.white.f_statistic:.4f} p={diagnostics.white.f_p_value:.4f}"
    )
    verdict = "neither rejected" if diagnostics.fail_to_reject else "rejected"
    print(f"linearity and homoskedasticity: {verdict} at 5%")


def stats_decompose(args):
    """stats decompose"""
    series = _load(args, [args.column])[args.column]
    result = additive_decompose(series, args.period or series.freq.periods_per_year)
    if args.json:
        _print_json(decomposition_dict(result))
        return
    print(f"{'date':<10}{'trend':>12}{'seasonal':>12}{'residual':>12}")
    for index, period in enumerate(series.periods):
        cells = "".join(
            f"{'':>12}" if component.missing[index] else f"{component.values[index]:>12.4f}"
            for component in (result.trend, result.seasonal, result.residual)
        )
        print(f"{format_period(period):<10}{cells}")


def stats_corr(args):
    """stats corr"""
    matrix = correlation_matrix(_load(args, args.columns or None))
    if args.json:
        _print_json(correlation_dict(matrix))
        return
    width = max(12, *(len(name) + 2 for name in matrix.names))
    print(f"{'':<{width}}" + "".join(f"{name:>{width}}" for name in matrix.names))
    for name, row in zip(matrix.names, matrix.values):
        print(f"{name:<{width}}" + "".join(f"{value:>{width}.4f}" for value in row))


def stats_describe(args):
    """stats describe"""
    panel = _load(args, args.columns or None)
    descriptions = {column.name: describe(column) for column in panel.columns}
    if args.json:
        _print_json({name: description_dict(value) for name, value in descriptions.items()})
        return
    print(DESCRIPTION_HEADER)
    for name, description in descriptions.items():
        print(_format_description(name, description))


COMMANDS: Dict[Tuple[str, str], Callable] = {
    ("sim", "run"): sim_run,
    ("sim", "compare"): sim_compare,
    ("sim", "suite"): sim_suite,
    ("calibrate", "epop"): calibrate_epop,
    ("calibrate", "wage"): calibrate_wage,
    ("calibrate", "phillips"): calibrate_phillips,
    ("calibrate", "passthrough"): calibrate_passthrough,
    ("calibrate", "var"): calibrate_var,
    ("stats", "adf"): stats_adf,
    ("stats", "johansen"): stats_johansen,
    ("stats", "ols"): stats_ols,
    ("stats", "diagnostics"): stats_diagnostics,
    ("stats", "decompose"): stats_decompose,
    ("stats", "corr"): stats_corr,
    ("stats", "describe"): stats_describe,
}


def main(raw_args: Optional[List[str]] = None):
    """Runs the command-line interface."""
    args = parse_args(sys.argv[1:] if raw_args is None else raw_args)
    configure_logging(args.verbose)

    try:
        COMMANDS[(args.command, args.action)](args)
    except PolicyThresholdsException as error:
        print(f"Error: {error.message}", file=sys.stderr)
        sys.exit(error.exit_code)


if __name__ == "__main__":
    main()
