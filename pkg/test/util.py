"""
Helpers shared by the tests: assertions, synthetic series and a CLI wrapper.
"""

import subprocess
import sys
from typing import List, Optional, Sequence

import numpy as np

from policy_thresholds.series_store import Frequency, TimeSeries


def assert_equal(actual, expected, explanation=None):
    """Assert that the two values are equal. Optionally provide explanation."""
    assert (
        actual == expected
    ), f"\nActual: {actual}\nExpected: {expected}\nAdditional_info: {explanation}"


def assert_close(actual, expected, tolerance: float, explanation=None):
    """Assert that |actual - expected| <= tolerance"""
    assert (
        abs(actual - expected) <= tolerance
    ), f"\nActual: {actual}\nExpected: {expected} +- {tolerance}\nAdditional_info: {explanation}"


def quarterly(name: str, values: Sequence[float], start: str = "1990Q1") -> TimeSeries:
    """Quarterly series from plain values"""
    return TimeSeries(name, Frequency.QUARTERLY, start, np.asarray(values, dtype=float))


def monthly(name: str, values: Sequence[float], start: str = "1990-01") -> TimeSeries:
    """Monthly series from plain values"""
    return TimeSeries(name, Frequency.MONTHLY, start, np.asarray(values, dtype=float))


def random_walk(rng: np.random.Generator, size: int, drift: float = 0.0) -> np.ndarray:
    """Cumulated Gaussian steps"""
    return np.cumsum(drift + rng.standard_normal(size))


def run_cli(*args: str, cwd: Optional[str] = None) -> subprocess.CompletedProcess:
    """Run the package entry point in a subprocess"""
    command: List[str] = [sys.executable, "-m", "policy_thresholds", *args]
    return subprocess.run(
        command, encoding="utf-8", check=False, capture_output=True, cwd=cwd
    )


def assert_exit_code(output: subprocess.CompletedProcess, expected: int):
    """Assert the process exit code, showing stderr on failure"""
    assert_equal(output.returncode, expected, output.stderr)
