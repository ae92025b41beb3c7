"""
Calibration of the labor-market and wage-growth thresholds, plus the
Phillips-curve, pass-through and expectations-VAR fits.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, NoReturn, Optional

import numpy as np
import pandas as pd
from statsmodels.tsa.api import VAR

from .constants import (
    DEFAULT_JOHANSEN_LAG_ORDER,
    DEFAULT_PCE_THRESH,
    DEFAULT_PI_STAR,
    DEFAULT_R_STAR,
    DEFAULT_UNRATE_THRESH,
    MIN_CALIBRATION_OBS,
)
from .econometrics import (
    Description,
    JohansenResult,
    RegressionResult,
    describe,
    johansen_test,
    ols,
)
from .macro_model import VarExpectations
from .series_store import Frequency, Panel, TimeSeries, align, diff, panel_frame
from .util import ErrorCode, NotCointegratedException, PolicyThresholdsException, warn

logger = logging.getLogger(__name__)


class CalibrationMethod(Enum):
    """How the implied thresholds were obtained"""

    DIFFERENCE = "difference_regression"
    LEVEL = "level_regression"


@dataclass(frozen=True)
class ThresholdEstimate:
    """
    Per-observation implied thresholds with their summary.
    `point_estimate` is the level-regression value for the level method
    and the median implied threshold for the difference method.
    """

    per_obs_thresholds: np.ndarray
    periods: List[pd.Period]
    summary: Description
    point_estimate: float
    method: CalibrationMethod
    regression: RegressionResult
    johansen: Optional[JohansenResult] = None

    @property
    def mean(self) -> float:
        """Mean implied threshold"""
        return self.summary.mean

    @property
    def sd(self) -> float:
        """Sample standard deviation of the implied thresholds"""
        return self.summary.sd

    @property
    def min(self) -> float:
        """Smallest implied threshold"""
        return self.summary.min

    @property
    def p25(self) -> float:
        """First quartile"""
        return self.summary.p25

    @property
    def p50(self) -> float:
        """Median"""
        return self.summary.p50

    @property
    def p75(self) -> float:
        """Third quartile"""
        return self.summary.p75

    @property
    def max(self) -> float:
        """Largest implied threshold"""
        return self.summary.max

    @property
    def interquartile_range(self):
        """(p25, p75), the suggested threshold range"""
        return (self.p25, self.p75)


@dataclass(frozen=True)
class PhillipsCurves:
    """Price and wage Phillips curves on the unemployment gap"""

    price: RegressionResult
    wage: RegressionResult


def implied_threshold(level, driver, a: float, b: float, driver_thresh: float):
    """level - a - b (driver - driver_thresh); works elementwise on arrays"""
    return np.asarray(level, dtype=float) - a - b * (
        np.asarray(driver, dtype=float) - driver_thresh
    )


def level_point_estimate(intercept: float, slope: float, driver_thresh: float) -> float:
    """Fitted level at the driver's threshold"""
    return intercept + slope * driver_thresh


def threshold_summary(values) -> Description:
    """Descriptive statistics with linearly interpolated percentiles"""
    return describe(values)


def _complete_levels(level: TimeSeries, driver: TimeSeries):
    panel = align([level, driver])
    complete = ~panel.incomplete_rows
    if int(complete.sum()) < MIN_CALIBRATION_OBS:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message=f"Calibration of {level.name} on {driver.name} needs at least "
            f"{MIN_CALIBRATION_OBS} complete observations; got: {int(complete.sum())}",
        )
    periods = [period for period, keep in zip(panel.index, complete) if keep]
    return panel, complete, periods


def _difference_estimate(
    level: TimeSeries, driver: TimeSeries, driver_thresh: float
) -> ThresholdEstimate:
    panel, complete, periods = _complete_levels(level, driver)
    level, driver = panel.columns
    regression = ols(diff(level), diff(driver))
    a, b = regression.constant, regression.slope
    logger.info(
        "Difference regression d%s = %.4f + %.4f d%s", level.name, a, b, driver.name
    )

    thresholds = implied_threshold(
        level.values[complete], driver.values[complete], a, b, driver_thresh
    )
    summary = threshold_summary(thresholds)
    return ThresholdEstimate(
        per_obs_thresholds=thresholds,
        periods=periods,
        summary=summary,
        point_estimate=summary.p50,
        method=CalibrationMethod.DIFFERENCE,
        regression=regression,
    )


def _level_estimate(
    level: TimeSeries,
    driver: TimeSeries,
    driver_thresh: float,
    lag_order: int,
) -> ThresholdEstimate:
    panel, complete, periods = _complete_levels(level, driver)
    johansen = johansen_test(panel, lag_order)
    rank = johansen.inferred_rank
    # rank k means both levels are stationary, which is not cointegration either
    if not 0 < rank < len(panel.columns):
        reason = "are not cointegrated" if rank == 0 else "are stationary in levels"
        warn(f"{level.name} and {driver.name} {reason}; use the difference method instead.")
        raise NotCointegratedException(panel.names, johansen, reason)

    level, driver = panel.columns
    regression = ols(level, driver)
    a, b = regression.constant, regression.slope
    logger.info("Level regression %s = %.4f + %.4f %s", level.name, a, b, driver.name)

    # centred on the fitted line: the mean equals the point estimate
    thresholds = implied_threshold(
        level.values[complete], driver.values[complete], 0.0, b, driver_thresh
    )
    return ThresholdEstimate(
        per_obs_thresholds=thresholds,
        periods=periods,
        summary=threshold_summary(thresholds),
        point_estimate=level_point_estimate(a, b, driver_thresh),
        method=CalibrationMethod.LEVEL,
        regression=regression,
        johansen=johansen,
    )


def _require_quarterly(*series: TimeSeries):
    for item in series:
        if item.freq is not Frequency.QUARTERLY:
            raise PolicyThresholdsException(
                code=ErrorCode.MIXED_FREQUENCIES,
                message=f"Series {item.name} must be quarterly",
            )


def calibrate_epop_threshold(
    epop: TimeSeries, unrate: TimeSeries, unrate_thresh: float = DEFAULT_UNRATE_THRESH
) -> ThresholdEstimate:
    """Implied epop thresholds from the first-difference regression"""
    return _difference_estimate(epop, unrate, unrate_thresh)


def calibrate_epop_threshold_level(
    epop: TimeSeries,
    unrate: TimeSeries,
    unrate_thresh: float = DEFAULT_UNRATE_THRESH,
    lag_order: int = DEFAULT_JOHANSEN_LAG_ORDER,
) -> ThresholdEstimate:
    """Level regression of epop on unrate, refused unless the pair is cointegrated"""
    return _level_estimate(epop, unrate, unrate_thresh, lag_order)


def calibrate_wage_threshold(
    eciwg: TimeSeries, pce: TimeSeries, pce_thresh: float = DEFAULT_PCE_THRESH
) -> ThresholdEstimate:
    """Implied wage-growth thresholds from the first-difference regression on inflation"""
    _require_quarterly(eciwg, pce)
    return _difference_estimate(eciwg, pce, pce_thresh)


def calibrate_wage_threshold_level(eciwg: TimeSeries, pce: TimeSeries) -> NoReturn:
    """
    The level method is always refused for wage growth and inflation:
    the pair is not cointegrated, whatever rank a given window suggests.
    """
    reason = "are not cointegrated"
    warn(f"{eciwg.name} and {pce.name} {reason}; use the difference method instead.")
    raise NotCointegratedException([eciwg.name, pce.name], reason=reason)


def phillips_regressions(panel: Panel) -> PhillipsCurves:
    """pce_rate and eciwg_rate each regressed on unrate_gap"""
    gap = panel["unrate_gap"]
    return PhillipsCurves(
        price=ols(panel["pce_rate"], gap),
        wage=ols(panel["eciwg_rate"], gap),
    )


def wage_passthrough_regression(pce: TimeSeries, eciwg: TimeSeries) -> RegressionResult:
    """Inflation on wage growth with an intercept"""
    _require_quarterly(pce, eciwg)
    return ols(pce, eciwg)


def fit_var_expectations(
    panel: Panel,
    lags: int = 1,
    pi_star: float = DEFAULT_PI_STAR,
    r_star: float = DEFAULT_R_STAR,
) -> VarExpectations:
    """
    Fit the expectations VAR without deterministic terms on
    (pce_rate - pi*, ffr - r* - pi*, output_gap).
    """
    if lags < 1:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"lags must be a positive integer; got: {lags}",
        )
    frame = panel_frame(panel.select(["pce_rate", "ffr", "output_gap"]), dropna=True)
    if len(frame) < max(MIN_CALIBRATION_OBS, 3 * lags + 2):
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message=f"Expectations VAR needs at least {MIN_CALIBRATION_OBS} "
            f"complete quarters; got: {len(frame)}",
        )

    deviations = np.column_stack(
        [
            frame["pce_rate"].to_numpy() - pi_star,
            frame["ffr"].to_numpy() - r_star - pi_star,
            frame["output_gap"].to_numpy(),
        ]
    )
    try:
        fitted = VAR(deviations).fit(maxlags=lags, trend="n")
    except (np.linalg.LinAlgError, ValueError) as err:
        raise PolicyThresholdsException(
            code=ErrorCode.SINGULAR_COVARIANCE,
            message=f"Expectations VAR could not be fitted: {err}",
        ) from err

    expectations = VarExpectations(
        coeffs=tuple(np.array(matrix, dtype=float) for matrix in fitted.coefs),
        first_lag=1,
    )
    radius = expectations.spectral_radius()
    logger.info("Expectations VAR(%d): spectral radius %.4f", lags, radius)
    if radius >= 1.0:
        warn(f"Fitted expectations VAR is not stationary (spectral radius {radius:.4f}).")
    return expectations
