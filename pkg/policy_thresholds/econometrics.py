"""
Statistical kernels: OLS with diagnostics, ADF unit-root test, Johansen
cointegration test, correlation matrix, additive decomposition.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import statsmodels.api as sm
from scipy import stats
from statsmodels.stats.diagnostic import het_white, linear_harvey_collier
from statsmodels.tsa.seasonal import seasonal_decompose
from statsmodels.tsa.stattools import adfuller
from statsmodels.tsa.vector_ar.vecm import coint_johansen

from .constants import (
    ADF_MIN_OBS,
    DEFAULT_JOHANSEN_LAG_ORDER,
    JOHANSEN_OBS_PER_COLUMN,
    SIGNIFICANCE_LEVEL,
)
from .series_store import Panel, TimeSeries, align, panel_frame
from .util import ErrorCode, PolicyThresholdsException, warn

logger = logging.getLogger(__name__)

Regressors = Union[Panel, TimeSeries]


class AdfSpec(Enum):
    """Deterministic terms of the ADF regression"""

    CONSTANT = "c"
    CONSTANT_TREND = "ct"
    NONE = "n"

    @classmethod
    def parse(cls, name: str) -> "AdfSpec":
        """Parse `constant`, `constant+trend`, `none` or the short codes"""
        aliases = {
            "constant": cls.CONSTANT,
            "constant+trend": cls.CONSTANT_TREND,
            "trend": cls.CONSTANT_TREND,
            "none": cls.NONE,
        }
        for member in cls:
            aliases[member.value] = member
        try:
            return aliases[name.lower()]
        except KeyError as err:
            raise PolicyThresholdsException(
                code=ErrorCode.INVALID_PARAMS,
                message=f"Invalid ADF specification: {name}. "
                "Valid options: constant, constant+trend, none",
            ) from err


class JohansenTrend(Enum):
    """Deterministic terms of the Johansen VECM, as statsmodels `det_order`"""

    NONE = -1
    CONSTANT = 0
    TREND = 1

    @classmethod
    def parse(cls, name: str) -> "JohansenTrend":
        """Parse `none`, `constant` or `trend`"""
        try:
            return cls[name.upper()]
        except KeyError as err:
            raise PolicyThresholdsException(
                code=ErrorCode.INVALID_PARAMS,
                message=f"Invalid Johansen deterministic term: {name}. "
                "Valid options: none, constant, trend",
            ) from err


@dataclass(frozen=True)
class RegressionResult:
    """OLS estimates; intercept first when included"""

    names: Tuple[str, ...]
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    r2: float
    adj_r2: float
    residuals: np.ndarray
    n_obs: int
    intercept: bool
    response: str

    def coefficient(self, name: str) -> float:
        """Coefficient by regressor name (`const` for the intercept)"""
        return float(self.coefficients[self.names.index(name)])

    @property
    def slope(self) -> float:
        """First non-intercept coefficient"""
        return float(self.coefficients[1 if self.intercept else 0])

    @property
    def constant(self) -> float:
        """Intercept, 0 when the regression has none"""
        return float(self.coefficients[0]) if self.intercept else 0.0


@dataclass(frozen=True)
class AdfResult:
    """Augmented Dickey-Fuller test outcome"""

    statistic: float
    p_value: float
    lags: int
    spec: AdfSpec
    n_obs: int
    critical_values: Dict[str, float]

    @property
    def reject_at_5pct(self) -> bool:
        """Unit root rejected at the 5% level"""
        return self.p_value < SIGNIFICANCE_LEVEL


@dataclass(frozen=True)
class JohansenResult:
    """Johansen trace and maximum-eigenvalue statistics per hypothesized rank"""

    names: Tuple[str, ...]
    trace_stats: np.ndarray
    max_eigen_stats: np.ndarray
    crit_5pct_trace: np.ndarray
    crit_5pct_maxeig: np.ndarray
    eigenvalues: np.ndarray
    lag_order: int
    n_obs: int
    trend: JohansenTrend = JohansenTrend.CONSTANT

    @property
    def inferred_rank(self) -> int:
        """Smallest rank whose trace statistic falls below its critical value"""
        for rank, (statistic, critical) in enumerate(
            zip(self.trace_stats, self.crit_5pct_trace)
        ):
            if statistic < critical:
                return rank
        return len(self.trace_stats)


@dataclass(frozen=True)
class TestStatistic:
    """Statistic with its p-value"""

    statistic: float
    p_value: float


@dataclass(frozen=True)
class WhiteResult:
    """White's heteroskedasticity test"""

    lm_statistic: float
    lm_p_value: float
    f_statistic: float
    f_p_value: float


@dataclass(frozen=True)
class Diagnostics:
    """Linearity and homoskedasticity checks of one regression"""

    harvey_collier: TestStatistic
    white: WhiteResult

    @property
    def fail_to_reject(self) -> bool:
        """Neither linearity nor homoskedasticity is rejected at 5%"""
        return (
            self.harvey_collier.p_value > SIGNIFICANCE_LEVEL
            and self.white.lm_p_value > SIGNIFICANCE_LEVEL
        )


@dataclass(frozen=True)
class CorrelationMatrix:
    """Labelled Pearson correlation matrix"""

    names: Tuple[str, ...]
    values: np.ndarray

    def get(self, first: str, second: str) -> float:
        """Correlation between two named columns"""
        return float(self.values[self.names.index(first), self.names.index(second)])


@dataclass(frozen=True)
class DecompositionResult:
    """Classical additive decomposition"""

    trend: TimeSeries
    seasonal: TimeSeries
    residual: TimeSeries
    period: int


@dataclass(frozen=True)
class Description:
    """Descriptive statistics; percentiles interpolate linearly between order statistics"""

    n: int
    mean: float
    sd: float
    min: float
    p25: float
    p50: float
    p75: float
    max: float


def _regressor_columns(X: Regressors) -> List[TimeSeries]:
    return list(X.columns) if isinstance(X, Panel) else [X]


def _regression_data(y: TimeSeries, X: Regressors) -> Tuple[np.ndarray, np.ndarray, List[str]]:
    """Align y with the regressors and drop incomplete rows listwise"""
    panel = align([y, *_regressor_columns(X)])
    frame = panel_frame(panel, dropna=True)
    values = frame.to_numpy(dtype=float)
    return values[:, 0], values[:, 1:], panel.names[1:]


def _design(regressors: np.ndarray, intercept: bool) -> np.ndarray:
    if intercept:
        return np.column_stack([np.ones(regressors.shape[0]), regressors])
    return regressors


def _fit(y: TimeSeries, X: Regressors, intercept: bool):
    response, regressors, names = _regression_data(y, X)
    design = _design(regressors, intercept)
    n_obs, n_params = design.shape

    if n_obs <= n_params:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message=f"Regression of {y.name} has {n_obs} complete observations "
            f"for {n_params} parameters",
        )
    if intercept:
        constant = [name for name, column in zip(names, regressors.T) if np.ptp(column) == 0]
        if constant:
            raise PolicyThresholdsException(
                code=ErrorCode.RANK_DEFICIENT,
                message=f"Regressor(s) {', '.join(constant)} are constant",
            )
    if np.linalg.matrix_rank(design) < n_params:
        raise PolicyThresholdsException(
            code=ErrorCode.RANK_DEFICIENT,
            message=f"Design matrix of the regression of {y.name} is rank deficient",
        )

    return sm.OLS(response, design).fit(), response, design, names


def ols(y: TimeSeries, X: Regressors, intercept: bool = True) -> RegressionResult:
    """Least squares with conventional standard errors"""
    fit, response, design, names = _fit(y, X, intercept)
    n_obs, n_params = design.shape

    coefficients = np.asarray(fit.params, dtype=float)
    std_errors = np.asarray(fit.bse, dtype=float)
    t_stats = np.full(n_params, np.nan)
    positive = std_errors > 0
    t_stats[positive] = coefficients[positive] / std_errors[positive]
    df_resid = n_obs - n_params
    p_values = np.where(positive, 2 * stats.t.sf(np.abs(t_stats), df_resid), np.nan)

    residuals = response - design @ coefficients
    ssr = float(residuals @ residuals)
    total = response - response.mean() if intercept else response
    tss = float(total @ total)
    r2 = 1.0 - ssr / tss if tss > 0 else 0.0
    dof_correction = (n_obs - 1) / df_resid if intercept else n_obs / df_resid
    adj_r2 = 1.0 - (1.0 - r2) * dof_correction

    logger.debug("OLS %s on %s: n=%d, adj_r2=%.4f", y.name, names, n_obs, adj_r2)
    return RegressionResult(
        names=tuple((["const"] if intercept else []) + names),
        coefficients=coefficients,
        std_errors=std_errors,
        t_stats=t_stats,
        p_values=p_values,
        r2=r2,
        adj_r2=min(adj_r2, 1.0),
        residuals=residuals,
        n_obs=n_obs,
        intercept=intercept,
        response=y.name,
    )


def _contiguous_values(series: TimeSeries) -> np.ndarray:
    """Values with leading and trailing gaps trimmed; interior gaps are rejected"""
    present = np.flatnonzero(~series.missing)
    if present.size == 0:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA, message=f"Series {series.name} is empty"
        )
    trimmed = series.values[present[0] : present[-1] + 1]
    if np.isnan(trimmed).any():
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_SERIES,
            message=f"Series {series.name} has interior missing values",
        )
    return trimmed


def default_max_lags(n_obs: int) -> int:
    """Schwert's rule: floor(12 * (n / 100) ^ 0.25)"""
    return int(math.floor(12 * (n_obs / 100.0) ** 0.25))


def adf_test(
    series: TimeSeries,
    max_lags: Optional[int] = None,
    spec: AdfSpec = AdfSpec.CONSTANT,
) -> AdfResult:
    """
    ADF regression with the lag order chosen by AIC up to `max_lags`.
    The p-value comes from MacKinnon's response-surface approximation.
    """
    values = _contiguous_values(series)
    if max_lags is None:
        max_lags = default_max_lags(values.size)
    if max_lags < 0:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"max_lags must be non-negative; got: {max_lags}",
        )
    if values.size - max_lags - 1 < ADF_MIN_OBS:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message=f"Series {series.name} has {values.size} observations; ADF with "
            f"{max_lags} lags needs at least {ADF_MIN_OBS + max_lags + 1}",
        )
    if np.ptp(values) == 0:
        raise PolicyThresholdsException(
            code=ErrorCode.CONSTANT_SERIES,
            message=f"Series {series.name} is constant",
        )

    try:
        statistic, p_value, lags, n_obs, critical_values, _ = adfuller(
            values, maxlag=max_lags, regression=spec.value, autolag="AIC"
        )
    except ValueError as err:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message=f"ADF on {series.name} with {max_lags} lags failed: {err}",
        ) from err
    logger.debug("ADF %s: stat=%.4f p=%.4f lags=%d", series.name, statistic, p_value, lags)
    return AdfResult(
        statistic=float(statistic),
        p_value=float(p_value),
        lags=int(lags),
        spec=spec,
        n_obs=int(n_obs),
        critical_values={key: float(value) for key, value in critical_values.items()},
    )


def johansen_test(
    panel: Panel,
    lag_order: int = DEFAULT_JOHANSEN_LAG_ORDER,
    trend: JohansenTrend = JohansenTrend.CONSTANT,
) -> JohansenResult:
    """
    Johansen test, by default with an unrestricted constant.
    Zero-mean driftless data call for `JohansenTrend.NONE`: with an unrestricted
    constant the last trace statistic over-rejects and full rank is inferred too often.
    `lag_order` is the VAR order in levels; the VECM uses lag_order - 1 differences.
    """
    n_columns = len(panel.columns)
    if n_columns < 2:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message="Johansen test needs at least two series",
        )
    if lag_order < 1:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"lag_order must be a positive integer; got: {lag_order}",
        )

    data = panel_frame(panel, dropna=True).to_numpy(dtype=float)
    n_obs = data.shape[0]
    if n_obs < JOHANSEN_OBS_PER_COLUMN * n_columns:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message=f"Johansen test on {n_columns} series needs at least "
            f"{JOHANSEN_OBS_PER_COLUMN * n_columns} observations; got: {n_obs}",
        )

    try:
        result = coint_johansen(data, det_order=trend.value, k_ar_diff=lag_order - 1)
    except (np.linalg.LinAlgError, ValueError) as err:
        raise PolicyThresholdsException(
            code=ErrorCode.SINGULAR_COVARIANCE,
            message=f"Johansen test on {', '.join(panel.names)} failed: {err}",
        ) from err
    if not np.all(np.isfinite(result.lr1)):
        raise PolicyThresholdsException(
            code=ErrorCode.SINGULAR_COVARIANCE,
            message=f"Covariance of {', '.join(panel.names)} is singular",
        )

    return JohansenResult(
        names=tuple(panel.names),
        trace_stats=np.asarray(result.lr1, dtype=float),
        max_eigen_stats=np.asarray(result.lr2, dtype=float),
        crit_5pct_trace=np.asarray(result.cvt[:, 1], dtype=float),
        crit_5pct_maxeig=np.asarray(result.cvm[:, 1], dtype=float),
        eigenvalues=np.asarray(result.eig, dtype=float),
        lag_order=lag_order,
        n_obs=n_obs,
        trend=trend,
    )


def reported_trace_consistent(statistic: float, critical_value: float, rejected: bool) -> bool:
    """
    Check a published trace statistic against the stated conclusion.
    Warns when the inequality and the conclusion disagree.
    """
    consistent = (statistic > critical_value) == rejected
    if not consistent:
        relation = ">" if statistic > critical_value else "<="
        warn(
            f"Reported trace statistic {statistic} {relation} {critical_value} "
            f"contradicts the stated {'rejection' if rejected else 'non-rejection'}; "
            "the sequential rule is applied to the computed statistics."
        )
    return consistent


def _refit(result: RegressionResult, y: TimeSeries, X: Regressors):
    fit, _, design, _ = _fit(y, X, result.intercept)
    if design.shape[0] != result.n_obs:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message="Regression result does not match the supplied data",
        )
    return fit, design


def harvey_collier(result: RegressionResult, y: TimeSeries, X: Regressors) -> TestStatistic:
    """Recursive-residual t-test of linearity; observations in time order"""
    n_params = len(result.coefficients)
    if result.n_obs < n_params + 2:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message=f"Harvey-Collier test needs at least {n_params + 2} observations",
        )
    fit, _ = _refit(result, y, X)
    outcome = linear_harvey_collier(fit)
    return TestStatistic(statistic=float(outcome[0]), p_value=float(outcome[1]))


def white_test(result: RegressionResult, y: TimeSeries, X: Regressors) -> WhiteResult:
    """LM and F versions of White's test on regressors, squares and cross-products"""
    fit, design = _refit(result, y, X)
    if not result.intercept:
        design = sm.add_constant(design, has_constant="add")
    n_aux = design.shape[1] * (design.shape[1] + 1) // 2
    if result.n_obs <= n_aux:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message=f"White's auxiliary regression has {n_aux} terms "
            f"but only {result.n_obs} observations",
        )
    try:
        lm_statistic, lm_p_value, f_statistic, f_p_value = het_white(fit.resid, design)
    except (ValueError, np.linalg.LinAlgError) as err:
        raise PolicyThresholdsException(
            code=ErrorCode.RANK_DEFICIENT,
            message=f"White's auxiliary design is degenerate: {err}",
        ) from err
    return WhiteResult(
        lm_statistic=float(lm_statistic),
        lm_p_value=float(lm_p_value),
        f_statistic=float(f_statistic),
        f_p_value=float(f_p_value),
    )


def regression_diagnostics(
    result: RegressionResult, y: TimeSeries, X: Regressors
) -> Diagnostics:
    """Harvey-Collier and White tests of one regression"""
    return Diagnostics(
        harvey_collier=harvey_collier(result, y, X),
        white=white_test(result, y, X),
    )


def correlation_matrix(panel: Panel) -> CorrelationMatrix:
    """Pearson correlations over complete rows; symmetric with unit diagonal"""
    data = panel_frame(panel, dropna=True).to_numpy(dtype=float)
    if data.shape[0] < 2:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message="Correlation needs at least two complete rows",
        )
    constant = [name for name, column in zip(panel.names, data.T) if np.ptp(column) == 0]
    if constant:
        raise PolicyThresholdsException(
            code=ErrorCode.CONSTANT_SERIES,
            message=f"Column(s) {', '.join(constant)} have zero variance",
        )

    values = np.corrcoef(data, rowvar=False)
    values = np.clip((values + values.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(values, 1.0)
    return CorrelationMatrix(names=tuple(panel.names), values=values)


def additive_decompose(series: TimeSeries, period: int) -> DecompositionResult:
    """
    Classical additive decomposition: centered moving-average trend,
    re-centered period means as the seasonal component, remainder as residual.
    """
    if period < 2:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"period must be at least 2; got: {period}",
        )
    if np.any(series.missing):
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_SERIES,
            message=f"Series {series.name} has missing values",
        )
    if len(series) < 2 * period:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message=f"Series {series.name} needs at least {2 * period} observations",
        )

    decomposition = seasonal_decompose(
        np.array(series.values), model="additive", period=period, two_sided=True
    )

    def component(suffix: str, values) -> TimeSeries:
        return TimeSeries(f"{series.name}_{suffix}", series.freq, series.start, values)

    return DecompositionResult(
        trend=component("trend", decomposition.trend),
        seasonal=component("seasonal", decomposition.seasonal),
        residual=component("residual", decomposition.resid),
        period=period,
    )


def describe(values: Union[TimeSeries, Sequence[float], np.ndarray]) -> Description:
    """Count, mean, sample standard deviation, extremes and quartiles"""
    data = values.present() if isinstance(values, TimeSeries) else np.asarray(values, dtype=float)
    data = data[~np.isnan(data)]
    if data.size == 0:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA, message="Nothing to describe"
        )
    p25, p50, p75 = np.percentile(data, [25, 50, 75])
    return Description(
        n=int(data.size),
        mean=float(data.mean()),
        sd=float(data.std(ddof=1)) if data.size > 1 else 0.0,
        min=float(data.min()),
        p25=float(p25),
        p50=float(p50),
        p75=float(p75),
        max=float(data.max()),
    )
