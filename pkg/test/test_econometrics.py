"""Testing the statistical kernels"""

import numpy as np
import pytest

from policy_thresholds.econometrics import (
    AdfSpec,
    JohansenTrend,
    additive_decompose,
    adf_test,
    correlation_matrix,
    default_max_lags,
    describe,
    johansen_test,
    ols,
    regression_diagnostics,
    reported_trace_consistent,
)
from policy_thresholds.series_store import Panel, diff, load_panel
from policy_thresholds.util import ErrorCode, PolicyThresholdsException

from .shared import INFLATION_CALIBRATION_END, INFLATION_QUARTERLY_PATH, LEVEL_EPOP_SLOPE
from .util import assert_close, assert_equal, quarterly, random_walk


@pytest.mark.econometrics
def test_ols_exact_fit():
    """Test coefficients of noiseless data"""
    x = np.arange(10, dtype=float)
    result = ols(quarterly("y", 1.5 + 2.0 * x), quarterly("x", x))

    assert_equal(result.names, ("const", "x"))
    assert_close(result.constant, 1.5, 1e-10)
    assert_close(result.slope, 2.0, 1e-10)
    assert_close(result.r2, 1.0, 1e-10)
    assert_equal(result.n_obs, 10)


@pytest.mark.econometrics
def test_ols_matches_normal_equations(rng):
    """Test estimates, standard errors and adjusted R2 against the closed form"""
    x = rng.standard_normal(60)
    y = 0.3 - 0.8 * x + 0.5 * rng.standard_normal(60)
    result = ols(quarterly("y", y), quarterly("x", x))

    design = np.column_stack([np.ones(60), x])
    beta = np.linalg.solve(design.T @ design, design.T @ y)
    residuals = y - design @ beta
    sigma2 = residuals @ residuals / 58
    std_errors = np.sqrt(np.diag(sigma2 * np.linalg.inv(design.T @ design)))
    r2 = 1 - residuals @ residuals / np.sum((y - y.mean()) ** 2)

    np.testing.assert_allclose(result.coefficients, beta, rtol=1e-10)
    np.testing.assert_allclose(result.std_errors, std_errors, rtol=1e-8)
    assert_close(result.adj_r2, 1 - (1 - r2) * 59 / 58, 1e-10)
    assert result.p_values[1] < 1e-6


@pytest.mark.econometrics
def test_ols_listwise_deletion():
    """Test rows with a missing cell are dropped"""
    x = [1.0, 2.0, np.nan, 4.0, 5.0, 6.0]
    y = [2.0, 4.0, 6.0, 8.0, np.nan, 12.0]
    result = ols(quarterly("y", y), quarterly("x", x))
    assert_equal(result.n_obs, 4)
    assert_close(result.slope, 2.0, 1e-10)


@pytest.mark.econometrics
def test_ols_without_intercept():
    """Test the regression through the origin"""
    x = np.arange(1, 8, dtype=float)
    result = ols(quarterly("y", 3.0 * x), quarterly("x", x), intercept=False)
    assert_equal(result.names, ("x",))
    assert_close(result.slope, 3.0, 1e-10)
    assert_equal(result.constant, 0.0)


@pytest.mark.econometrics
def test_ols_constant_regressor():
    """Test a zero-variance regressor is rank deficient"""
    with pytest.raises(PolicyThresholdsException) as raised:
        ols(quarterly("y", range(10)), quarterly("x", [2.0] * 10))
    assert_equal(raised.value.code, ErrorCode.RANK_DEFICIENT)


@pytest.mark.econometrics
def test_ols_collinear_regressors():
    """Test perfectly collinear regressors"""
    x = np.arange(12, dtype=float)
    panel = Panel((quarterly("a", x), quarterly("b", 2.0 * x + 1.0)))
    with pytest.raises(PolicyThresholdsException) as raised:
        ols(quarterly("y", x**2), panel)
    assert_equal(raised.value.code, ErrorCode.RANK_DEFICIENT)


@pytest.mark.econometrics
def test_ols_too_few_observations():
    """Test as many observations as parameters"""
    with pytest.raises(PolicyThresholdsException) as raised:
        ols(quarterly("y", [1.0, 2.0]), quarterly("x", [1.0, 3.0]))
    assert_equal(raised.value.code, ErrorCode.INSUFFICIENT_DATA)


@pytest.mark.econometrics
def test_default_max_lags():
    """Test Schwert's rule"""
    assert_equal(default_max_lags(100), 12)
    assert_equal(default_max_lags(500), 17)


@pytest.mark.econometrics
def test_adf_white_noise_and_random_walk(rng):
    """Test one draw of each: stationary noise rejects, a walk does not"""
    noise = adf_test(quarterly("noise", rng.standard_normal(400)))
    walk = adf_test(quarterly("walk", np.cumsum(rng.standard_normal(400))))

    assert noise.reject_at_5pct
    assert noise.statistic < noise.critical_values["5%"]
    assert_equal(noise.spec, AdfSpec.CONSTANT)
    assert set(walk.critical_values) == {"1%", "5%", "10%"}


@pytest.mark.econometrics
@pytest.mark.parametrize(
    "name, expected",
    [
        ("constant", AdfSpec.CONSTANT),
        ("constant+trend", AdfSpec.CONSTANT_TREND),
        ("ct", AdfSpec.CONSTANT_TREND),
        ("none", AdfSpec.NONE),
    ],
)
def test_adf_spec_parse(name, expected):
    """Test deterministic term names"""
    assert_equal(AdfSpec.parse(name), expected)


@pytest.mark.econometrics
def test_adf_constant_series():
    """Test a constant series"""
    with pytest.raises(PolicyThresholdsException) as raised:
        adf_test(quarterly("x", [1.0] * 60), max_lags=2)
    assert_equal(raised.value.code, ErrorCode.CONSTANT_SERIES)


@pytest.mark.econometrics
def test_adf_short_series():
    """Test too few observations for the requested lags"""
    with pytest.raises(PolicyThresholdsException) as raised:
        adf_test(quarterly("x", np.arange(15, dtype=float)), max_lags=4)
    assert_equal(raised.value.code, ErrorCode.INSUFFICIENT_DATA)


@pytest.mark.econometrics
def test_adf_interior_gap():
    """Test interior missing values are rejected, edge gaps trimmed"""
    values = np.sin(np.arange(60.0))
    values[30] = np.nan
    with pytest.raises(PolicyThresholdsException) as raised:
        adf_test(quarterly("x", values), max_lags=2)
    assert_equal(raised.value.code, ErrorCode.INVALID_SERIES)

    edged = np.concatenate([[np.nan], np.sin(np.arange(60.0)), [np.nan]])
    assert adf_test(quarterly("x", edged), max_lags=2).n_obs <= 59


@pytest.mark.econometrics
def test_adf_fixture_levels_and_differences(labor_panel):
    """Test bundled epop and unrate look integrated of order one"""
    for name in ("epop", "unrate"):
        level = adf_test(labor_panel[name])
        change = adf_test(diff(labor_panel[name]))
        assert level.p_value > 0.05, name
        assert change.p_value < 0.05, name


@pytest.mark.econometrics
def test_johansen_fixture_rank(labor_panel):
    """Test the bundled epop and unrate share one cointegrating relation"""
    result = johansen_test(labor_panel)
    assert_equal(result.inferred_rank, 1)
    assert_equal(result.names, ("epop", "unrate"))
    assert_equal(len(result.trace_stats), 2)
    assert result.trace_stats[0] > result.crit_5pct_trace[0]
    assert np.all(np.diff(result.eigenvalues) <= 0)


@pytest.mark.econometrics
def test_johansen_needs_two_series(labor_panel):
    """Test a single series"""
    with pytest.raises(PolicyThresholdsException) as raised:
        johansen_test(labor_panel.select(["epop"]))
    assert_equal(raised.value.code, ErrorCode.INVALID_PARAMS)


@pytest.mark.econometrics
def test_johansen_short_sample():
    """Test fewer than ten observations per series"""
    panel = Panel(
        (quarterly("a", np.arange(15.0) ** 1.5), quarterly("b", np.sqrt(np.arange(15.0))))
    )
    with pytest.raises(PolicyThresholdsException) as raised:
        johansen_test(panel)
    assert_equal(raised.value.code, ErrorCode.INSUFFICIENT_DATA)


@pytest.mark.econometrics
def test_reported_trace_consistency():
    """Test a published statistic contradicting its stated conclusion is flagged"""
    assert reported_trace_consistent(20.1, 15.49, rejected=True)
    assert reported_trace_consistent(3.2, 3.84, rejected=False)
    assert not reported_trace_consistent(12.3, 15.49, rejected=True)


@pytest.mark.econometrics
def test_level_regression_fixture(labor_panel):
    """Test the bundled level relation between epop and unrate"""
    result = ols(labor_panel["epop"], labor_panel["unrate"])
    assert_close(result.slope, LEVEL_EPOP_SLOPE, 0.05)
    assert_close(result.adj_r2, 0.916, 0.05)

    correlation = correlation_matrix(labor_panel)
    assert correlation.get("epop", "unrate") < -0.9


@pytest.mark.econometrics
def test_wage_difference_regression_diagnostics():
    """Test linearity and homoskedasticity are not rejected for the wage regression"""
    panel = load_panel(
        INFLATION_QUARTERLY_PATH, ["eciwg_rate", "pce_rate"], end=INFLATION_CALIBRATION_END
    )
    y, x = diff(panel["eciwg_rate"]), diff(panel["pce_rate"])
    diagnostics = regression_diagnostics(ols(y, x), y, x)

    assert diagnostics.fail_to_reject
    assert diagnostics.harvey_collier.p_value > 0.05
    assert diagnostics.white.lm_p_value > 0.05


@pytest.mark.econometrics
def test_harvey_collier_detects_curvature(rng):
    """Test a convex relation ordered by its regressor fails the linearity test"""
    x = np.linspace(0.0, 4.0, 80)
    y = x**2 + 0.05 * rng.standard_normal(80)
    diagnostics = regression_diagnostics(
        ols(quarterly("y", y), quarterly("x", x)), quarterly("y", y), quarterly("x", x)
    )
    assert diagnostics.harvey_collier.p_value < 0.01
    assert not diagnostics.fail_to_reject


@pytest.mark.econometrics
def test_white_detects_heteroskedasticity(rng):
    """Test noise growing with the regressor fails White's test"""
    x = np.linspace(0.1, 5.0, 200)
    y = 1.0 + x + x * rng.standard_normal(200)
    diagnostics = regression_diagnostics(
        ols(quarterly("y", y), quarterly("x", x)), quarterly("y", y), quarterly("x", x)
    )
    assert diagnostics.white.lm_p_value < 0.01


@pytest.mark.econometrics
def test_correlation_matrix_properties(rng):
    """Test symmetry, unit diagonal, bounds and positive semi-definiteness"""
    data = rng.standard_normal((50, 3))
    data[:, 1] += data[:, 0]
    panel = Panel(tuple(quarterly(name, data[:, index]) for index, name in enumerate("abc")))
    matrix = correlation_matrix(panel)

    np.testing.assert_allclose(matrix.values, matrix.values.T)
    np.testing.assert_allclose(np.diag(matrix.values), 1.0)
    assert np.all(np.abs(matrix.values) <= 1.0)
    assert np.min(np.linalg.eigvalsh(matrix.values)) >= -1e-10
    assert matrix.get("a", "b") > 0.5


@pytest.mark.econometrics
def test_correlation_constant_column():
    """Test a zero-variance column"""
    panel = Panel((quarterly("a", [1.0, 2.0, 3.0]), quarterly("b", [1.0, 1.0, 1.0])))
    with pytest.raises(PolicyThresholdsException) as raised:
        correlation_matrix(panel)
    assert_equal(raised.value.code, ErrorCode.CONSTANT_SERIES)


@pytest.mark.econometrics
def test_additive_decomposition_recovers_components():
    """Test trend, seasonal and residual add back up and the seasonal pattern is found"""
    pattern = np.array([1.0, -0.5, 0.25, -0.75])
    quarters = np.arange(40)
    values = 0.1 * quarters + pattern[quarters % 4]
    result = additive_decompose(quarterly("x", values), 4)

    inner = ~result.trend.missing
    assert_equal(int(result.trend.missing.sum()), 4)
    np.testing.assert_allclose(
        (result.trend.values + result.seasonal.values + result.residual.values)[inner],
        values[inner],
    )
    np.testing.assert_allclose(result.seasonal.values[:4], pattern, atol=1e-10)
    np.testing.assert_allclose(result.residual.values[inner], 0.0, atol=1e-10)


@pytest.mark.econometrics
def test_additive_decomposition_short_series():
    """Test fewer than two full periods"""
    with pytest.raises(PolicyThresholdsException) as raised:
        additive_decompose(quarterly("x", np.arange(7.0)), 4)
    assert_equal(raised.value.code, ErrorCode.INSUFFICIENT_DATA)


@pytest.mark.econometrics
def test_describe():
    """Test descriptive statistics with linear percentiles"""
    description = describe([1.0, 2.0, 3.0, 4.0, 5.0])
    assert_equal(description.n, 5)
    assert_equal(description.mean, 3.0)
    assert_close(description.sd, np.sqrt(2.5), 1e-12)
    assert_equal((description.min, description.p25, description.p50), (1.0, 2.0, 3.0))
    assert_equal((description.p75, description.max), (4.0, 5.0))

    with pytest.raises(PolicyThresholdsException):
        describe([])


@pytest.mark.econometrics
def test_ols_residuals_orthogonal_to_regressors(rng):
    """Test the residuals are orthogonal to the constant and every regressor"""
    data = rng.standard_normal((80, 2))
    y = 0.4 + data @ np.array([1.5, -0.7]) + rng.standard_normal(80)
    regressors = Panel((quarterly("a", data[:, 0]), quarterly("b", data[:, 1])))
    result = ols(quarterly("y", y), regressors)

    design = np.column_stack([np.ones(80), data])
    assert np.all(np.abs(design.T @ result.residuals) < 1e-8 * 80)


@pytest.mark.econometrics
@pytest.mark.parametrize("scale, shift", [(3.0, 100.0), (0.01, -5.0), (-2.0, 0.0)])
def test_adf_invariant_to_affine_rescaling(rng, scale, shift):
    """Test rescaling and shifting the series leaves the statistic and lag order unchanged"""
    walk = random_walk(rng, 200)
    original = adf_test(quarterly("walk", walk))
    rescaled = adf_test(quarterly("walk", scale * walk + shift))

    assert_equal(rescaled.lags, original.lags)
    assert_close(rescaled.statistic, original.statistic, 1e-8 * abs(original.statistic))


@pytest.mark.econometrics
def test_johansen_deterministic_term(labor_panel):
    """Test the deterministic term is recorded and changes the statistics"""
    constant = johansen_test(labor_panel)
    none = johansen_test(labor_panel, trend=JohansenTrend.NONE)

    assert_equal(constant.trend, JohansenTrend.CONSTANT)
    assert_equal(none.trend, JohansenTrend.NONE)
    assert not np.allclose(constant.trace_stats, none.trace_stats)
    assert np.all(np.diff(none.trace_stats) <= 0)


@pytest.mark.econometrics
@pytest.mark.parametrize(
    "name, expected",
    [
        ("none", JohansenTrend.NONE),
        ("Constant", JohansenTrend.CONSTANT),
        ("trend", JohansenTrend.TREND),
    ],
)
def test_johansen_trend_parse(name, expected):
    """Test the deterministic term names"""
    assert_equal(JohansenTrend.parse(name), expected)


@pytest.mark.econometrics
def test_johansen_trend_parse_invalid():
    """Test an unknown deterministic term"""
    with pytest.raises(PolicyThresholdsException) as raised:
        JohansenTrend.parse("quadratic")
    assert_equal(raised.value.code, ErrorCode.INVALID_PARAMS)
