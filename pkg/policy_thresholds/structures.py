"""
JSON output structures of the CLI
"""

from typing import Dict, List, Optional

from typing_extensions import Literal, TypedDict

from .calibration import PhillipsCurves, ThresholdEstimate
from .econometrics import (
    AdfResult,
    CorrelationMatrix,
    DecompositionResult,
    Description,
    Diagnostics,
    JohansenResult,
    RegressionResult,
)
from .macro_model import VarExpectations
from .scenarios.runner import ComparisonResult, SuiteResult
from .series_store import TimeSeries, format_period

Period = str


class DescriptionDict(TypedDict):
    """TypedDict for descriptive statistics"""

    n: int
    mean: float
    sd: float
    min: float
    p25: float
    p50: float
    p75: float
    max: float


class RegressionDict(TypedDict):
    """TypedDict for an OLS fit"""

    response: str
    names: List[str]
    coefficients: List[float]
    std_errors: List[float]
    t_stats: List[float]
    p_values: List[float]
    r2: float
    adj_r2: float
    n_obs: int


class AdfDict(TypedDict):
    """TypedDict for an ADF test"""

    series: str
    statistic: float
    p_value: float
    lags: int
    spec: Literal["c", "ct", "n"]
    n_obs: int
    critical_values: Dict[str, float]
    reject_at_5pct: bool


class JohansenDict(TypedDict):
    """TypedDict for a Johansen test"""

    names: List[str]
    trace_stats: List[float]
    max_eigen_stats: List[float]
    crit_5pct_trace: List[float]
    crit_5pct_maxeig: List[float]
    eigenvalues: List[float]
    lag_order: int
    n_obs: int
    trend: Literal["none", "constant", "trend"]
    inferred_rank: int


class DiagnosticsDict(TypedDict):
    """TypedDict for regression diagnostics"""

    harvey_collier_statistic: float
    harvey_collier_p_value: float
    white_lm_statistic: float
    white_lm_p_value: float
    white_f_statistic: float
    white_f_p_value: float
    fail_to_reject: bool


class CorrelationDict(TypedDict):
    """TypedDict for a correlation matrix"""

    names: List[str]
    values: List[List[float]]


class DecompositionDict(TypedDict):
    """TypedDict for an additive decomposition; missing trend ends are null"""

    period: int
    dates: List[Period]
    trend: List[Optional[float]]
    seasonal: List[Optional[float]]
    residual: List[Optional[float]]


class ThresholdDict(TypedDict):
    """TypedDict for a calibrated threshold"""

    method: Literal["difference_regression", "level_regression"]
    point_estimate: float
    summary: DescriptionDict
    regression: RegressionDict
    johansen: Optional[JohansenDict]


class PhillipsDict(TypedDict):
    """TypedDict for the price and wage Phillips curves"""

    price: RegressionDict
    wage: RegressionDict


class VarDict(TypedDict):
    """TypedDict for expectations VAR coefficients"""

    first_lag: int
    coeffs: List[List[List[float]]]
    spectral_radius: float


class ComparisonDict(TypedDict):
    """TypedDict for a scenario comparison"""

    title: str
    variants: List[str]
    liftoff: Dict[str, Optional[Period]]
    peak_deviations: Dict[str, Dict[str, float]]


class SuiteEntryDict(TypedDict):
    """TypedDict for one scenario of a suite"""

    number: int
    name: str
    comparison: ComparisonDict


def _floats(values) -> List[float]:
    return [float(value) for value in values]


def _nullable(series: TimeSeries) -> List[Optional[float]]:
    return [
        None if missing else float(value) for value, missing in zip(series.values, series.missing)
    ]


def description_dict(description: Description) -> DescriptionDict:
    """Convert descriptive statistics"""
    return {
        "n": description.n,
        "mean": description.mean,
        "sd": description.sd,
        "min": description.min,
        "p25": description.p25,
        "p50": description.p50,
        "p75": description.p75,
        "max": description.max,
    }


def regression_dict(result: RegressionResult) -> RegressionDict:
    """Convert an OLS fit"""
    return {
        "response": result.response,
        "names": list(result.names),
        "coefficients": _floats(result.coefficients),
        "std_errors": _floats(result.std_errors),
        "t_stats": _floats(result.t_stats),
        "p_values": _floats(result.p_values),
        "r2": float(result.r2),
        "adj_r2": float(result.adj_r2),
        "n_obs": result.n_obs,
    }


def adf_dict(name: str, result: AdfResult) -> AdfDict:
    """Convert an ADF test"""
    return {
        "series": name,
        "statistic": result.statistic,
        "p_value": result.p_value,
        "lags": result.lags,
        "spec": result.spec.value,
        "n_obs": result.n_obs,
        "critical_values": dict(result.critical_values),
        "reject_at_5pct": result.reject_at_5pct,
    }


def johansen_dict(result: JohansenResult) -> JohansenDict:
    """Convert a Johansen test"""
    return {
        "names": list(result.names),
        "trace_stats": _floats(result.trace_stats),
        "max_eigen_stats": _floats(result.max_eigen_stats),
        "crit_5pct_trace": _floats(result.crit_5pct_trace),
        "crit_5pct_maxeig": _floats(result.crit_5pct_maxeig),
        "eigenvalues": _floats(result.eigenvalues),
        "lag_order": result.lag_order,
        "n_obs": result.n_obs,
        "trend": result.trend.name.lower(),
        "inferred_rank": result.inferred_rank,
    }


def diagnostics_dict(diagnostics: Diagnostics) -> DiagnosticsDict:
    """Convert regression diagnostics"""
    return {
        "harvey_collier_statistic": diagnostics.harvey_collier.statistic,
        "harvey_collier_p_value": diagnostics.harvey_collier.p_value,
        "white_lm_statistic": diagnostics.white.lm_statistic,
        "white_lm_p_value": diagnostics.white.lm_p_value,
        "white_f_statistic": diagnostics.white.f_statistic,
        "white_f_p_value": diagnostics.white.f_p_value,
        "fail_to_reject": diagnostics.fail_to_reject,
    }


def correlation_dict(matrix: CorrelationMatrix) -> CorrelationDict:
    """Convert a correlation matrix"""
    return {
        "names": list(matrix.names),
        "values": [_floats(row) for row in matrix.values],
    }


def decomposition_dict(result: DecompositionResult) -> DecompositionDict:
    """Convert an additive decomposition"""
    return {
        "period": result.period,
        "dates": [format_period(period) for period in result.trend.periods],
        "trend": _nullable(result.trend),
        "seasonal": _nullable(result.seasonal),
        "residual": _nullable(result.residual),
    }


def threshold_dict(estimate: ThresholdEstimate) -> ThresholdDict:
    """Convert a calibrated threshold"""
    return {
        "method": estimate.method.value,
        "point_estimate": float(estimate.point_estimate),
        "summary": description_dict(estimate.summary),
        "regression": regression_dict(estimate.regression),
        "johansen": None if estimate.johansen is None else johansen_dict(estimate.johansen),
    }


def phillips_dict(curves: PhillipsCurves) -> PhillipsDict:
    """Convert the Phillips-curve pair"""
    return {"price": regression_dict(curves.price), "wage": regression_dict(curves.wage)}


def var_dict(expectations: VarExpectations) -> VarDict:
    """Convert expectations VAR coefficients"""
    return {
        "first_lag": expectations.first_lag,
        "coeffs": [[_floats(row) for row in matrix] for matrix in expectations.coeffs],
        "spectral_radius": float(expectations.spectral_radius()),
    }


def comparison_dict(result: ComparisonResult) -> ComparisonDict:
    """Convert a scenario comparison"""
    return {
        "title": result.title,
        "variants": result.names,
        "liftoff": {
            name: None if period is None else format_period(period)
            for name, period in result.liftoff.items()
        },
        "peak_deviations": {
            name: dict(deviations) for name, deviations in result.peak_deviations.items()
        },
    }


def suite_dict(results: List[SuiteResult]) -> List[SuiteEntryDict]:
    """Convert suite results in manifest order"""
    return [
        {
            "number": entry.number,
            "name": entry.scenario.name,
            "comparison": comparison_dict(entry.result),
        }
        for entry in results
    ]
