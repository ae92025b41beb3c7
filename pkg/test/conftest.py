"""
Fixtures for tests
"""

from __future__ import annotations

import numpy as np
import pytest

from policy_thresholds.macro_model import ModelParams, steady_state
from policy_thresholds.scenarios.config import load_scenario
from policy_thresholds.scenarios.runner import default_var_expectations
from policy_thresholds.series_store import load_panel

from .shared import (
    AD_SHOCK_SCENARIO,
    INFLATION_QUARTERLY_PATH,
    LABOR_CALIBRATION_END,
    LABOR_MONTHLY_PATH,
)


@pytest.fixture(name="rng")
def fixture_rng(request):
    """
    Fixture to return a seeded random generator; the seed may be parametrized
    """
    return np.random.default_rng(getattr(request, "param", 20130101))


@pytest.fixture(name="model_params")
def fixture_model_params():
    """
    Fixture to return the default structural coefficients
    """
    return ModelParams()


@pytest.fixture(name="steady")
def fixture_steady(model_params):
    """
    Fixture to return the steady state of the default model
    """
    return steady_state(model_params)


@pytest.fixture(name="var_expectations")
def fixture_var_expectations():
    """
    Fixture to return the bundled expectations VAR
    """
    return default_var_expectations()


@pytest.fixture(name="labor_panel")
def fixture_labor_panel():
    """
    Fixture to return the monthly labor panel over the calibration window
    """
    return load_panel(LABOR_MONTHLY_PATH, ["epop", "unrate"], end=LABOR_CALIBRATION_END)


@pytest.fixture(name="inflation_panel")
def fixture_inflation_panel(request):
    """
    Fixture to return the quarterly inflation panel, optionally windowed by (start, end)
    """
    start, end = getattr(request, "param", (None, None))
    return load_panel(INFLATION_QUARTERLY_PATH, start=start, end=end)


@pytest.fixture(name="ad_shock_scenario")
def fixture_ad_shock_scenario():
    """
    Fixture to return the bundled aggregate demand scenario
    """
    return load_scenario(AD_SHOCK_SCENARIO)
