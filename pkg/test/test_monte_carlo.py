"""Testing rejection rates of the unit-root, cointegration and White tests on simulated data"""

import pytest

from policy_thresholds.econometrics import (
    JohansenTrend,
    adf_test,
    johansen_test,
    ols,
    white_test,
)
from policy_thresholds.series_store import Panel

from .shared import MONTE_CARLO_SEEDS
from .util import quarterly, random_walk

# 90% of the draws, 85% for independent walks
REQUIRED = 180
REQUIRED_INDEPENDENT = 170


@pytest.mark.monte_carlo
def test_adf_rejects_white_noise(rng):
    """Test stationary noise is found stationary in nearly every draw"""
    rejections = sum(
        adf_test(quarterly("noise", rng.standard_normal(500))).reject_at_5pct
        for _ in range(MONTE_CARLO_SEEDS)
    )
    assert rejections >= REQUIRED, rejections


@pytest.mark.monte_carlo
def test_adf_keeps_random_walk(rng):
    """Test the unit root of a random walk is kept at roughly the nominal size"""
    keeps = sum(
        not adf_test(quarterly("walk", random_walk(rng, 500))).reject_at_5pct
        for _ in range(MONTE_CARLO_SEEDS)
    )
    assert keeps >= REQUIRED, keeps


@pytest.mark.monte_carlo
def test_johansen_finds_cointegrated_pair(rng):
    """Test a driftless walk and twice the walk plus noise have rank one"""
    ranks = []
    for _ in range(MONTE_CARLO_SEEDS):
        walk = random_walk(rng, 500)
        double = 2.0 * walk + rng.standard_normal(500)
        panel = Panel((quarterly("y1", walk), quarterly("y2", double)))
        ranks.append(johansen_test(panel, trend=JohansenTrend.NONE).inferred_rank)
    assert ranks.count(1) >= REQUIRED, ranks.count(1)


@pytest.mark.monte_carlo
def test_johansen_rejects_independent_walks(rng):
    """Test two unrelated driftless walks have rank zero"""
    ranks = []
    for _ in range(MONTE_CARLO_SEEDS):
        panel = Panel(
            (quarterly("y1", random_walk(rng, 500)), quarterly("y2", random_walk(rng, 500)))
        )
        ranks.append(johansen_test(panel, trend=JohansenTrend.NONE).inferred_rank)
    assert ranks.count(0) >= REQUIRED_INDEPENDENT, ranks.count(0)


@pytest.mark.monte_carlo
def test_white_keeps_homoskedastic_errors(rng):
    """Test constant-variance noise passes White's test at roughly the nominal size"""
    passes = 0
    for _ in range(MONTE_CARLO_SEEDS):
        x = quarterly("x", rng.standard_normal(200))
        y = quarterly("y", 1.0 + 0.5 * x.values + rng.standard_normal(200))
        passes += white_test(ols(y, x), y, x).lm_p_value > 0.05
    assert passes >= REQUIRED, passes
