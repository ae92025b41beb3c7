"""
Utility functions and the exception hierarchy used across the project.
"""

import math
import sys
from enum import Enum, auto
from typing import Optional, Sequence


class ErrorCode(Enum):
    """Enumerate error kinds raised across the project."""

    INVALID_SERIES = auto()
    INVALID_PARAMS = auto()
    INVALID_SCENARIO = auto()
    MIXED_FREQUENCIES = auto()
    EMPTY_INTERSECTION = auto()
    MISMATCHED_HORIZONS = auto()
    INSUFFICIENT_DATA = auto()
    RANK_DEFICIENT = auto()
    CONSTANT_SERIES = auto()
    SINGULAR_COVARIANCE = auto()
    NOT_COINTEGRATED = auto()
    UNSTABLE_MODEL = auto()
    NON_CONVERGENCE = auto()
    SEARCH_SPACE_TOO_LARGE = auto()
    ZERO_DENOMINATOR = auto()
    IO_FAILURE = auto()

    @property
    def exit_code(self) -> int:
        """Process exit code: 2 validation, 3 numerical, 4 I/O"""
        if self in _VALIDATION_ERRORS:
            return 2
        if self is ErrorCode.IO_FAILURE:
            return 4
        return 3


_VALIDATION_ERRORS = frozenset(
    [
        ErrorCode.INVALID_SERIES,
        ErrorCode.INVALID_PARAMS,
        ErrorCode.INVALID_SCENARIO,
        ErrorCode.MIXED_FREQUENCIES,
        ErrorCode.EMPTY_INTERSECTION,
        ErrorCode.MISMATCHED_HORIZONS,
        ErrorCode.NOT_COINTEGRATED,
    ]
)


class PolicyThresholdsException(Exception):
    """
    Exception raised across the project.
    Carries an error code which determines the exit code of the CLI.
    """

    def __init__(self, code: ErrorCode, message: str):
        super().__init__(message)
        self.code = code
        self.message = message

    @property
    def exit_code(self) -> int:
        """Exit code of the CLI for this exception"""
        return self.code.exit_code


class NotCointegratedException(PolicyThresholdsException):
    """Exception raised when a level regression would be spurious"""

    def __init__(
        self, columns: Sequence[str], johansen=None, reason: str = "are not cointegrated"
    ):
        super().__init__(
            code=ErrorCode.NOT_COINTEGRATED,
            message=f"Series {', '.join(columns)} {reason}; "
            "the level regression would be spurious.",
        )
        self.johansen = johansen


class UnstableModelException(PolicyThresholdsException):
    """Exception raised when the linear transition is not stable"""

    def __init__(self, spectral_radius: float, what: str = "model transition"):
        super().__init__(
            code=ErrorCode.UNSTABLE_MODEL,
            message=f"Spectral radius of the {what} is {spectral_radius:.6g} (must be < 1).",
        )
        self.spectral_radius = spectral_radius


class NonConvergenceException(PolicyThresholdsException):
    """Exception raised when the solver hits its iteration cap"""

    def __init__(self, iterations: int, best_path: Sequence[float], best_loss: float):
        super().__init__(
            code=ErrorCode.NON_CONVERGENCE,
            message=f"Solver did not converge after {iterations} sweeps; "
            f"best loss found: {best_loss:.10g}",
        )
        self.best_path = list(best_path)
        self.best_loss = best_loss


def check_finite(name: str, value: float, code: ErrorCode = ErrorCode.INVALID_PARAMS):
    """Raise if value is not a finite real"""
    if not math.isfinite(value):
        raise PolicyThresholdsException(
            code=code, message=f"{name} must be finite; got: {value}"
        )


def check_range(
    name: str,
    value: float,
    low: Optional[float] = None,
    high: Optional[float] = None,
    *,
    low_open: bool = False,
    high_open: bool = False,
):
    """Raise INVALID_PARAMS if value is outside the given interval"""
    check_finite(name, value)
    too_low = low is not None and (value <= low if low_open else value < low)
    too_high = high is not None and (value >= high if high_open else value > high)
    if too_low or too_high:
        left = "(" if low_open else "["
        right = ")" if high_open else "]"
        low_str = "-inf" if low is None else f"{low:g}"
        high_str = "inf" if high is None else f"{high:g}"
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"{name} must be in {left}{low_str}, {high_str}{right}; got: {value}",
        )


def warn(msg: str, file=sys.stderr):
    """Log a warning"""
    print(f"\033[93m{msg}\033[0m", file=file)
