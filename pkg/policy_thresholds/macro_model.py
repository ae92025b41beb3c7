"""
Reduced-form quarterly macro model: output gap, inflation, wages,
unemployment, participation and the long yield under shocks and a
policy-rate rule, with VAR expectations.
"""

import dataclasses
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import marshmallow_dataclass
import numpy as np
from marshmallow import ValidationError

from .constants import (
    DEFAULT_FISCAL_DRAG,
    DEFAULT_KAPPA,
    DEFAULT_LAMBDA,
    DEFAULT_LFPR_TREND,
    DEFAULT_LFPR_UNRATE_PASS,
    DEFAULT_MU,
    DEFAULT_NAIRU,
    DEFAULT_OIL_PASSTHROUGH,
    DEFAULT_OKUN,
    DEFAULT_PHI,
    DEFAULT_PI_STAR,
    DEFAULT_POTENTIAL_GROWTH,
    DEFAULT_PROD_GROWTH,
    DEFAULT_R_STAR,
    DEFAULT_RHO_X,
    DEFAULT_SIGMA,
    DEFAULT_TERM_PREMIUM,
    LONG_YIELD_QUARTERS,
)
from .policy_rules import Policy, RuleParams, ThresholdState, anchored, taylor
from .util import (
    ErrorCode,
    PolicyThresholdsException,
    UnstableModelException,
    check_finite,
    check_range,
)

logger = logging.getLogger(__name__)

VAR_VARIABLES = ("pi", "r", "x")


@dataclass(frozen=True)
class ModelParams:
    """Structural coefficients; rates and gaps in percent"""

    sigma: float = DEFAULT_SIGMA
    rho_x: float = DEFAULT_RHO_X
    kappa: float = DEFAULT_KAPPA
    lam: float = DEFAULT_LAMBDA
    mu: float = DEFAULT_MU
    phi: float = DEFAULT_PHI
    okun: float = DEFAULT_OKUN
    nairu: float = DEFAULT_NAIRU
    r_star: float = DEFAULT_R_STAR
    pi_star: float = DEFAULT_PI_STAR
    prod_growth: float = DEFAULT_PROD_GROWTH
    oil_passthrough: float = DEFAULT_OIL_PASSTHROUGH
    term_premium: float = DEFAULT_TERM_PREMIUM
    lfpr_trend: float = DEFAULT_LFPR_TREND
    lfpr_unrate_pass: float = DEFAULT_LFPR_UNRATE_PASS
    potential_growth: float = DEFAULT_POTENTIAL_GROWTH
    fiscal_drag: float = DEFAULT_FISCAL_DRAG

    def __post_init__(self):
        for param in dataclasses.fields(self):
            check_finite(param.name, getattr(self, param.name))
        check_range("rho_x", self.rho_x, 0.0, 1.0, high_open=True)
        check_range("lambda", self.lam, 0.0, 1.0)
        check_range("mu", self.mu, 0.0, 1.0)
        for name in ("sigma", "kappa", "phi", "oil_passthrough", "fiscal_drag", "nairu"):
            check_range(name, getattr(self, name), 0.0)
        check_range("okun", self.okun, 0.0, low_open=True)
        check_range("lfpr_trend", self.lfpr_trend, 0.0, 100.0, low_open=True)

    def rule_params(self, base: Optional[RuleParams] = None) -> RuleParams:
        """Rule coefficients anchored to this model's r*, pi* and NAIRU"""
        return anchored(base or RuleParams(), self.r_star, self.pi_star, self.nairu)


@dataclass(frozen=True)
class ModelState:
    """One quarter of the model; epop follows from lfpr and u"""

    x: float
    pi: float
    pi_core: float
    wage: float
    u: float
    lfpr: float
    r: float
    rg10: float
    rgdp_growth: float
    ptr: float

    def __post_init__(self):
        for state_field in dataclasses.fields(self):
            check_finite(state_field.name, getattr(self, state_field.name))
        check_range("u", self.u, 0.0)
        check_range("lfpr", self.lfpr, 0.0, 100.0, low_open=True)

    @property
    def epop(self) -> float:
        """Employment-to-population ratio"""
        return self.lfpr * (1.0 - self.u / 100.0)

    def value(self, name: str) -> float:
        """State variable by field name or reported-series name"""
        if name in _REPORTED_FIELDS:
            name = _REPORTED_FIELDS[name]
        if name == "epop":
            return self.epop
        try:
            return getattr(self, name)
        except AttributeError as err:
            raise PolicyThresholdsException(
                code=ErrorCode.INVALID_PARAMS, message=f"Unknown model variable: {name}"
            ) from err


_REPORTED_FIELDS = {
    "ffr": "r",
    "rgdpch": "rgdp_growth",
    "unrate": "u",
    "pce_rate": "pi",
    "eciwg_rate": "wage",
    "corepce_rate": "pi_core",
}


def steady_state(params: ModelParams) -> ModelState:
    """Fixed point of the model without shocks"""
    neutral = params.r_star + params.pi_star
    return ModelState(
        x=0.0,
        pi=params.pi_star,
        pi_core=params.pi_star,
        wage=params.pi_star + params.prod_growth,
        u=params.nairu,
        lfpr=params.lfpr_trend,
        r=neutral,
        rg10=neutral + params.term_premium,
        rgdp_growth=params.potential_growth,
        ptr=params.pi_star,
    )


def output_gap_from_unrate(u: float, params: ModelParams) -> float:
    """Okun's law inverted"""
    return (params.nairu - u) / params.okun


class ShockKind(Enum):
    """Supported shocks"""

    AGGREGATE_DEMAND = "aggregate_demand"
    OIL = "oil"
    LFPR_SHIFT = "lfpr_shift"
    PTR_DRIFT = "ptr_drift"
    FFR_SURPRISE = "ffr_surprise"
    GOV_SPENDING = "gov_spending"


@dataclass(frozen=True)
class Shock:
    """
    Shock active over [start, start + duration) in quarters from the simulation start.
    Aggregate demand uses a residual per quarter; ptr drift spreads `amount`
    evenly over its duration; a funds-rate surprise is given in basis points.
    """

    kind: ShockKind
    start: int = 0
    duration: Optional[int] = None
    amount: float = 0.0
    path: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(float(value) for value in self.path))
        if self.kind is ShockKind.AGGREGATE_DEMAND:
            if not self.path:
                raise PolicyThresholdsException(
                    code=ErrorCode.INVALID_PARAMS,
                    message="Aggregate demand shock needs a residual path",
                )
            if self.duration is None:
                object.__setattr__(self, "duration", len(self.path))
            elif self.duration != len(self.path):
                raise PolicyThresholdsException(
                    code=ErrorCode.INVALID_PARAMS,
                    message=f"Shock duration {self.duration} differs from its path length "
                    f"{len(self.path)}",
                )
        elif self.duration is None:
            object.__setattr__(self, "duration", 1)

        if self.start < 0:
            raise PolicyThresholdsException(
                code=ErrorCode.INVALID_PARAMS,
                message=f"Shock start must be non-negative; got: {self.start}",
            )
        if self.duration < 1:
            raise PolicyThresholdsException(
                code=ErrorCode.INVALID_PARAMS,
                message=f"Shock duration must be a positive integer; got: {self.duration}",
            )
        check_finite("amount", self.amount)
        for value in self.path:
            check_finite("path", value)

    @property
    def end(self) -> int:
        """First quarter after the shock"""
        return self.start + self.duration

    def active(self, quarter: int) -> bool:
        """Whether the shock applies in the quarter"""
        return self.start <= quarter < self.end

    def value_at(self, quarter: int) -> float:
        """Contribution in model units during the quarter"""
        if not self.active(quarter):
            return 0.0
        if self.kind is ShockKind.AGGREGATE_DEMAND:
            return self.path[quarter - self.start]
        if self.kind is ShockKind.PTR_DRIFT:
            return self.amount / self.duration
        if self.kind is ShockKind.FFR_SURPRISE:
            return self.amount / 100.0
        return self.amount


@dataclass(frozen=True)
class ShockTotals:
    """Sum of active shocks per channel in one quarter"""

    demand: float = 0.0
    gov_spending: float = 0.0
    oil: float = 0.0
    lfpr_shift: float = 0.0
    ptr_drift: float = 0.0
    ffr_surprise: float = 0.0


_SHOCK_CHANNELS = {
    ShockKind.AGGREGATE_DEMAND: "demand",
    ShockKind.GOV_SPENDING: "gov_spending",
    ShockKind.OIL: "oil",
    ShockKind.LFPR_SHIFT: "lfpr_shift",
    ShockKind.PTR_DRIFT: "ptr_drift",
    ShockKind.FFR_SURPRISE: "ffr_surprise",
}


def shock_totals(shocks: Sequence[Shock], quarter: int) -> ShockTotals:
    """Active shocks of a quarter summed per channel"""
    totals = dict.fromkeys(_SHOCK_CHANNELS.values(), 0.0)
    for shock in shocks:
        totals[_SHOCK_CHANNELS[shock.kind]] += shock.value_at(quarter)
    return ShockTotals(**totals)


class Fiscal(Enum):
    """Fiscal feedback on the output gap"""

    NONE = "none"
    SURPLUS_STABILIZING = "surplus_stabilizing"
    DEBT_STABILIZING = "debt_stabilizing"


class ExpectationsMode(Enum):
    """How agents form the expected policy path"""

    VAR = "var"
    PERFECT_FORESIGHT = "perfect_foresight"


@dataclass(frozen=True)
class VarExpectations:
    """Coefficient matrices over (pi, r, x) deviations for lags first_lag, first_lag + 1, ..."""

    coeffs: Tuple[np.ndarray, ...]
    first_lag: int = 1

    def __post_init__(self):
        matrices = tuple(np.array(matrix, dtype=float) for matrix in self.coeffs)
        if not matrices:
            raise PolicyThresholdsException(
                code=ErrorCode.INVALID_PARAMS,
                message="Expectations VAR needs at least one coefficient matrix",
            )
        for matrix in matrices:
            if matrix.shape != (3, 3) or not np.all(np.isfinite(matrix)):
                raise PolicyThresholdsException(
                    code=ErrorCode.INVALID_PARAMS,
                    message="Expectations VAR coefficients must be finite 3x3 matrices",
                )
            matrix.setflags(write=False)
        if self.first_lag < 1:
            raise PolicyThresholdsException(
                code=ErrorCode.INVALID_PARAMS,
                message=f"first_lag must be a positive integer; got: {self.first_lag}",
            )
        object.__setattr__(self, "coeffs", matrices)

    @property
    def max_lag(self) -> int:
        """Longest lag used"""
        return self.first_lag + len(self.coeffs) - 1

    def lag_matrix(self, lag: int) -> np.ndarray:
        """Coefficient of the given lag, zero outside the fitted range"""
        if self.first_lag <= lag <= self.max_lag:
            return self.coeffs[lag - self.first_lag]
        return np.zeros((3, 3))

    def companion(self) -> np.ndarray:
        """Companion matrix of the VAR(max_lag)"""
        order = self.max_lag
        matrix = np.zeros((3 * order, 3 * order))
        for lag in range(1, order + 1):
            matrix[:3, 3 * (lag - 1) : 3 * lag] = self.lag_matrix(lag)
        if order > 1:
            matrix[3:, :-3] = np.eye(3 * (order - 1))
        return matrix

    def spectral_radius(self) -> float:
        """Largest eigenvalue modulus of the companion matrix"""
        return float(np.max(np.abs(np.linalg.eigvals(self.companion()))))

    def check_stationary(self):
        """Raise unless the expectation process is stationary"""
        radius = self.spectral_radius()
        if radius >= 1.0:
            raise UnstableModelException(radius, what="expectations VAR")

    def summed(self) -> "VarExpectations":
        """One-lag VAR with the coefficients summed over lags"""
        return VarExpectations((sum(self.coeffs[1:], self.coeffs[0].copy()),), first_lag=1)


@marshmallow_dataclass.dataclass
class VarExpectationsFile:
    """JSON layout of a frozen expectations VAR"""

    coeffs: List[List[List[float]]]
    first_lag: int = 1
    variables: List[str] = field(default_factory=lambda: list(VAR_VARIABLES))
    note: Optional[str] = None


def load_var_expectations(path: str) -> VarExpectations:
    """Read a frozen VAR; rejects non-stationary coefficients"""
    try:
        with open(path, encoding="utf-8") as var_file:
            loaded = VarExpectationsFile.Schema().loads(var_file.read())
    except OSError as err:
        raise PolicyThresholdsException(
            code=ErrorCode.IO_FAILURE, message=f"Cannot read {path}: {err}"
        ) from err
    except (AttributeError, KeyError, TypeError, ValueError, ValidationError) as err:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"Invalid expectations VAR file {path}: {err}",
        ) from err

    if tuple(loaded.variables) != VAR_VARIABLES:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"Expectations VAR must be over {', '.join(VAR_VARIABLES)}; "
            f"got: {', '.join(loaded.variables)}",
        )
    expectations = VarExpectations(
        coeffs=tuple(np.array(matrix) for matrix in loaded.coeffs),
        first_lag=loaded.first_lag,
    )
    expectations.check_stationary()
    return expectations


def save_var_expectations(expectations: VarExpectations, path: str, note: Optional[str] = None):
    """Freeze a VAR to JSON"""
    dumped = VarExpectationsFile(
        coeffs=[matrix.tolist() for matrix in expectations.coeffs],
        first_lag=expectations.first_lag,
        note=note,
    )
    try:
        with open(path, "w", encoding="utf-8") as var_file:
            var_file.write(VarExpectationsFile.Schema().dumps(dumped, indent=2))
            var_file.write("\n")
    except OSError as err:
        raise PolicyThresholdsException(
            code=ErrorCode.IO_FAILURE, message=f"Cannot write {path}: {err}"
        ) from err


def var_expect(history: np.ndarray, e: VarExpectations, horizon: int) -> np.ndarray:
    """
    Iterated forecast of the (pi, r, x) deviations.
    `history` holds one row per quarter, most recent last; returns `horizon` rows.
    """
    history = np.asarray(history, dtype=float)
    if history.ndim != 2 or history.shape[1] != 3:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message="VAR history must have one (pi, r, x) row per quarter",
        )
    if history.shape[0] < e.max_lag:
        raise PolicyThresholdsException(
            code=ErrorCode.INSUFFICIENT_DATA,
            message=f"VAR expectations need {e.max_lag} quarters of history; "
            f"got: {history.shape[0]}",
        )
    if horizon < 1:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"horizon must be a positive integer; got: {horizon}",
        )

    rows = list(history[-e.max_lag :])
    forecast = np.empty((horizon, 3))
    for h in range(horizon):
        nxt = np.zeros(3)
        for offset, matrix in enumerate(e.coeffs):
            nxt += matrix @ rows[-(e.first_lag + offset)]
        forecast[h] = nxt
        rows.append(nxt)
    return forecast


@dataclass(frozen=True)
class Expectations:
    """Expected absolute paths for the quarters after the current one"""

    pi: np.ndarray
    r: np.ndarray
    x: np.ndarray


def deviations(state: ModelState, params: ModelParams) -> np.ndarray:
    """(pi - ptr, r - r* - ptr, x)"""
    return np.array([state.pi - state.ptr, state.r - params.r_star - state.ptr, state.x])


def expectations_from_history(
    history: Sequence[ModelState],
    params: ModelParams,
    e: VarExpectations,
    horizon: int = LONG_YIELD_QUARTERS,
) -> Expectations:
    """VAR forecast re-centred on the current long-run inflation expectation"""
    forecast = var_expect(
        np.array([deviations(state, params) for state in history[-e.max_lag :]]),
        e,
        horizon,
    )
    ptr = history[-1].ptr
    return Expectations(
        pi=forecast[:, 0] + ptr,
        r=forecast[:, 1] + params.r_star + ptr,
        x=forecast[:, 2],
    )


def long_yield(
    path: Sequence[float],
    term_premium: float,
    quarters: int = LONG_YIELD_QUARTERS,
) -> float:
    """Mean expected short rate over `quarters`, padded with the last rate, plus the premium"""
    rates = np.asarray(path, dtype=float)
    if rates.size == 0:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS, message="Empty expected policy path"
        )
    if rates.size < quarters:
        rates = np.concatenate([rates, np.full(quarters - rates.size, rates[-1])])
    return float(rates[:quarters].mean()) + term_premium


def _fiscal_feedback(fiscal: Fiscal, params: ModelParams, x: float, x_prev: float) -> float:
    if fiscal is Fiscal.SURPLUS_STABILIZING:
        return -params.fiscal_drag * x
    if fiscal is Fiscal.DEBT_STABILIZING:
        return -params.fiscal_drag * x_prev
    return 0.0


def step(
    state: ModelState,
    r_next: float,
    shocks: ShockTotals,
    params: ModelParams,
    expected: Expectations,
    *,
    fiscal: Fiscal = Fiscal.NONE,
    x_prev: Optional[float] = None,
    x_year_ago: Optional[float] = None,
) -> ModelState:
    """
    Advance one quarter given the policy rate set for it.
    `x_prev` and `x_year_ago` are the output gaps one and three quarters
    before `state`; both default to the current gap.
    """
    check_finite("r_next", r_next)
    x_prev = state.x if x_prev is None else x_prev
    x_year_ago = state.x if x_year_ago is None else x_year_ago

    x = (
        params.rho_x * state.x
        - params.sigma * (r_next - state.pi - params.r_star)
        + shocks.demand
        + shocks.gov_spending
        + _fiscal_feedback(fiscal, params, state.x, x_prev)
    )
    expected_pi = float(expected.pi[0])
    pi_core = params.lam * state.pi_core + (1.0 - params.lam) * expected_pi + params.kappa * x
    pi = (
        params.lam * state.pi
        + (1.0 - params.lam) * expected_pi
        + params.kappa * x
        + params.oil_passthrough * shocks.oil
    )
    u = params.nairu - params.okun * x + params.lfpr_unrate_pass * shocks.lfpr_shift
    wage = (
        params.mu * state.wage
        + (1.0 - params.mu) * (pi + params.prod_growth)
        - params.phi * (u - params.nairu)
    )
    rate_path = np.concatenate([[r_next], np.asarray(expected.r[1:LONG_YIELD_QUARTERS])])

    return ModelState(
        x=x,
        pi=pi,
        pi_core=pi_core,
        wage=wage,
        u=max(u, 0.0),
        lfpr=params.lfpr_trend + shocks.lfpr_shift,
        r=r_next,
        rg10=long_yield(rate_path, params.term_premium),
        rgdp_growth=params.potential_growth + (x - x_year_ago),
        ptr=state.ptr + shocks.ptr_drift,
    )


_TRANSITION_FIELDS = ("x", "pi", "pi_core", "wage", "r")


def transition_matrix(
    params: ModelParams, e: VarExpectations, rule_params: Optional[RuleParams] = None
) -> np.ndarray:
    """
    Linear map of the (x, pi, pi_core, wage, r) deviations from the steady state
    under the unconstrained Taylor rule, built from unit perturbations.
    """
    rule_params = rule_params or params.rule_params()
    summed = e.summed()
    base = steady_state(params)
    matrix = np.zeros((len(_TRANSITION_FIELDS), len(_TRANSITION_FIELDS)))
    for column, name in enumerate(_TRANSITION_FIELDS):
        perturbed = dataclasses.replace(base, **{name: getattr(base, name) + 1.0})
        expected = expectations_from_history([perturbed], params, summed)
        moved = step(perturbed, taylor(perturbed, rule_params), ShockTotals(), params, expected)
        matrix[:, column] = [moved.value(row) - base.value(row) for row in _TRANSITION_FIELDS]
    return matrix


def spectral_radius(matrix: np.ndarray) -> float:
    """Largest eigenvalue modulus"""
    return float(np.max(np.abs(np.linalg.eigvals(matrix))))


@dataclass(frozen=True)
class Trajectory:
    """Simulated quarters after the initial state, with the policy bookkeeping"""

    initial: ModelState
    states: Tuple[ModelState, ...]
    rule_rates: Tuple[float, ...]
    thresholds: Tuple[ThresholdState, ...]

    def __len__(self) -> int:
        return len(self.states)

    def variable(self, name: str) -> np.ndarray:
        """Path of one variable"""
        return np.array([state.value(name) for state in self.states])

    @property
    def rates(self) -> np.ndarray:
        """Effective policy-rate path"""
        return self.variable("r")


def _realized_long_yields(states: List[ModelState], term_premium: float) -> List[ModelState]:
    rates = [state.r for state in states]
    return [
        dataclasses.replace(state, rg10=long_yield(rates[index:], term_premium))
        for index, state in enumerate(states)
    ]


def simulate(
    initial: ModelState,
    params: ModelParams,
    policy: Policy,
    shocks: Sequence[Shock],
    horizon: int,
    e: VarExpectations,
    *,
    expectations: ExpectationsMode = ExpectationsMode.VAR,
    fiscal: Fiscal = Fiscal.NONE,
    rule_params: Optional[RuleParams] = None,
    check_stability: bool = True,
) -> Trajectory:
    """
    Deterministic simulation over `horizon` quarters.
    Each quarter the policy sees the current state, the threshold state and the
    expectations, and sets the rate for the next quarter.
    """
    if horizon < 1:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"horizon must be a positive integer; got: {horizon}",
        )
    if check_stability:
        radius = spectral_radius(transition_matrix(params, e, rule_params))
        logger.debug("Transition spectral radius: %.6f", radius)
        if radius >= 1.0:
            raise UnstableModelException(radius)

    history = [initial] * e.max_lag
    gaps = [initial.x]
    states: List[ModelState] = []
    rule_rates: List[float] = []
    threshold_path: List[ThresholdState] = []
    thresholds = ThresholdState()

    for quarter in range(horizon):
        state = history[-1]
        expected = expectations_from_history(history, params, e)
        decision = policy(state, thresholds, expected, quarter)
        totals = shock_totals(shocks, quarter)

        rate = decision.rate + totals.ffr_surprise
        if decision.floor is not None:
            rate = max(rate, decision.floor)

        new_state = step(
            state,
            rate,
            totals,
            params,
            expected,
            fiscal=fiscal,
            x_prev=gaps[-2] if len(gaps) >= 2 else gaps[-1],
            x_year_ago=gaps[-4] if len(gaps) >= 4 else gaps[0],
        )
        thresholds = decision.thresholds
        history.append(new_state)
        gaps.append(new_state.x)
        states.append(new_state)
        rule_rates.append(decision.rule_rate)
        threshold_path.append(thresholds)

    if expectations is ExpectationsMode.PERFECT_FORESIGHT:
        states = _realized_long_yields(states, params.term_premium)

    return Trajectory(
        initial=initial,
        states=tuple(states),
        rule_rates=tuple(rule_rates),
        thresholds=tuple(threshold_path),
    )
