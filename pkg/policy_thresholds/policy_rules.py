"""
Policy-rate reaction functions, the effective lower bound and the
threshold-based liftoff latch.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, Callable, Optional, Sequence

from .constants import (
    DEFAULT_A_PI,
    DEFAULT_A_Y,
    DEFAULT_ECI_THRESH,
    DEFAULT_ELB,
    DEFAULT_EPOP_THRESH,
    DEFAULT_INERTIA,
    DEFAULT_NAIRU,
    DEFAULT_PCE_THRESH,
    DEFAULT_PI_STAR,
    DEFAULT_R_STAR,
    DEFAULT_U_GAP_COEFF,
    DEFAULT_U_PI_COEFF,
    DEFAULT_U_PI_STAR_COEFF,
    DEFAULT_UNRATE_THRESH,
    LIFTOFF_EPSILON,
    MODIFIED_COEFF,
)
from .util import ErrorCode, PolicyThresholdsException, check_finite, check_range

if TYPE_CHECKING:
    from .macro_model import Expectations, ModelState


class Rule(Enum):
    """Selectable policy rules"""

    TAYLOR = "taylor"
    INERTIAL = "inertial"
    UNEMP_GAP = "unemp_gap"
    MODIFIED = "modified"
    OPTIMAL_CONTROL = "optimal_control"


@dataclass(frozen=True)
class RuleParams:
    """Reaction-function coefficients; r_star, pi_star and nairu are anchored to the model"""

    a_pi: float = DEFAULT_A_PI
    a_y: float = DEFAULT_A_Y
    inertia: float = DEFAULT_INERTIA
    u_gap_coeff: float = DEFAULT_U_GAP_COEFF
    u_pi_coeff: float = DEFAULT_U_PI_COEFF
    u_pi_star_coeff: float = DEFAULT_U_PI_STAR_COEFF
    elb: float = DEFAULT_ELB
    r_star: float = DEFAULT_R_STAR
    pi_star: float = DEFAULT_PI_STAR
    nairu: float = DEFAULT_NAIRU
    zlb: bool = True

    def __post_init__(self):
        for name in (
            "a_pi",
            "a_y",
            "u_gap_coeff",
            "u_pi_coeff",
            "u_pi_star_coeff",
            "r_star",
            "pi_star",
            "nairu",
        ):
            check_finite(name, getattr(self, name))
        check_range("inertia", self.inertia, 0.0, 1.0)
        check_range("elb", self.elb, 0.0)

    @classmethod
    def modified(cls, **kwargs) -> "RuleParams":
        """Coefficients of the aggressive rule"""
        kwargs.setdefault("a_pi", MODIFIED_COEFF)
        kwargs.setdefault("a_y", MODIFIED_COEFF)
        return cls(**kwargs)


def taylor(state: "ModelState", params: RuleParams) -> float:
    """r* + pi + a_pi (pi - pi*) + a_y x"""
    return (
        params.r_star
        + state.pi
        + params.a_pi * (state.pi - params.pi_star)
        + params.a_y * state.x
    )


def inertial_taylor(prev_r: float, state: "ModelState", params: RuleParams) -> float:
    """Convex combination of the previous rate and the Taylor prescription"""
    check_finite("prev_r", prev_r)
    return params.inertia * prev_r + (1.0 - params.inertia) * taylor(state, params)


def unemp_gap_taylor(state: "ModelState", params: RuleParams) -> float:
    """
    r* + pi + c_pi pi - c_pi* pi* + c_u (u - nairu).
    Unemployment above NAIRU raises the rate.
    """
    return (
        params.r_star
        + state.pi
        + params.u_pi_coeff * state.pi
        - params.u_pi_star_coeff * params.pi_star
        + params.u_gap_coeff * (state.u - params.nairu)
    )


def modified_taylor(state: "ModelState", params: RuleParams) -> float:
    """Taylor form floored at zero; used with coefficients of 2"""
    return max(taylor(state, params), 0.0)


def rule_rate(rule: Rule, state: "ModelState", params: RuleParams) -> float:
    """Unconstrained prescription of a rule; the previous rate is the state's rate"""
    if rule is Rule.TAYLOR:
        return taylor(state, params)
    if rule is Rule.INERTIAL:
        return inertial_taylor(state.r, state, params)
    if rule is Rule.UNEMP_GAP:
        return unemp_gap_taylor(state, params)
    if rule is Rule.MODIFIED:
        return modified_taylor(state, params)
    raise PolicyThresholdsException(
        code=ErrorCode.INVALID_PARAMS,
        message=f"{rule.value} is not a reaction function",
    )


class ThresholdSide(Enum):
    """Inflation-side measure released by the threshold"""

    PCE = "pce"
    ECI_WAGE = "eciwage"
    EPOP = "epop"
    NONE = "none"

    @property
    def default_threshold(self) -> Optional[float]:
        """Threshold used when none is configured"""
        return {
            ThresholdSide.PCE: DEFAULT_PCE_THRESH,
            ThresholdSide.ECI_WAGE: DEFAULT_ECI_THRESH,
            ThresholdSide.EPOP: DEFAULT_EPOP_THRESH,
            ThresholdSide.NONE: None,
        }[self]


@dataclass(frozen=True)
class ThresholdConfig:
    """Unemployment threshold plus one inflation-side threshold"""

    unrate_thresh: float = DEFAULT_UNRATE_THRESH
    side: ThresholdSide = ThresholdSide.PCE
    value: Optional[float] = None
    active: bool = True

    def __post_init__(self):
        if self.value is None:
            object.__setattr__(self, "value", self.side.default_threshold)
        if self.side is ThresholdSide.NONE:
            object.__setattr__(self, "active", False)
        check_range("unrate_thresh", self.unrate_thresh, 0.0, low_open=True)
        if self.value is not None:
            check_range("threshold value", self.value, 0.0, low_open=True)

    @classmethod
    def inactive(cls) -> "ThresholdConfig":
        """No threshold guidance"""
        return cls(side=ThresholdSide.NONE)


@dataclass(frozen=True)
class ThresholdObservation:
    """Current values checked against the thresholds"""

    unrate: float
    inflation_side: float


@dataclass(frozen=True)
class ThresholdState:
    """The dmpt* indicator block; dmptr is latched"""

    dmptunrate: int = 0
    dmpt_infl: int = 0
    dmptmax: int = 0
    dmptr: int = 0

    def __post_init__(self):
        for name in ("dmptunrate", "dmpt_infl", "dmptmax", "dmptr"):
            if getattr(self, name) not in (0, 1):
                raise PolicyThresholdsException(
                    code=ErrorCode.INVALID_PARAMS,
                    message=f"{name} must be 0 or 1; got: {getattr(self, name)}",
                )
        if self.dmptmax != max(self.dmptunrate, self.dmpt_infl):
            raise PolicyThresholdsException(
                code=ErrorCode.INVALID_PARAMS,
                message="dmptmax must equal max(dmptunrate, dmpt_infl)",
            )


def raw_dmptunrate(unrate: float, cfg: ThresholdConfig) -> int:
    """Level indicator 1{unrate > unrate_thresh}; the latch uses its complement"""
    return int(unrate > cfg.unrate_thresh)


def update_thresholds(
    ts: ThresholdState, obs: ThresholdObservation, cfg: ThresholdConfig
) -> ThresholdState:
    """
    Recompute the indicators for one quarter.
    The labor indicator fires once unemployment is at or below its threshold;
    the inflation-side indicator fires when the measure strictly exceeds its threshold.
    An inactive configuration leaves the state untouched.
    """
    if not cfg.active:
        return ts

    dmptunrate = 1 - raw_dmptunrate(obs.unrate, cfg)
    dmpt_infl = int(obs.inflation_side > cfg.value)
    dmptmax = max(dmptunrate, dmpt_infl)
    return ThresholdState(
        dmptunrate=dmptunrate,
        dmpt_infl=dmpt_infl,
        dmptmax=dmptmax,
        dmptr=max(dmptmax, ts.dmptr),
    )


def effective_rate(
    rate: float,
    ts: ThresholdState,
    cfg: ThresholdConfig,
    elb: float = DEFAULT_ELB,
    zlb: bool = True,
) -> float:
    """Hold at the bound until released, then floor the rule rate at the bound"""
    if cfg.active and ts.dmptr == 0:
        return elb
    return max(rate, elb) if zlb else rate


def liftoff_quarter(rates: Sequence[float], elb: float = DEFAULT_ELB) -> Optional[int]:
    """Index of the first rate above the bound, None if the rate never lifts off"""
    if len(rates) == 0:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS, message="Empty rate trajectory"
        )
    for index, rate in enumerate(rates):
        if rate > elb + LIFTOFF_EPSILON:
            return index
    return None


@dataclass(frozen=True)
class PolicyDecision:
    """Rate set for the coming quarter; `floor` bounds any later surprise"""

    rate: float
    rule_rate: float
    thresholds: ThresholdState
    floor: Optional[float] = None


Policy = Callable[
    ["ModelState", ThresholdState, "Expectations", int], PolicyDecision
]


def inflation_measure(
    state: "ModelState", expected: "Expectations", cfg: ThresholdConfig
) -> float:
    """
    Value compared with the inflation-side threshold: expected inflation
    four quarters ahead, current wage growth or current epop.
    """
    if cfg.side is ThresholdSide.PCE:
        return float(expected.pi[min(3, len(expected.pi) - 1)])
    if cfg.side is ThresholdSide.ECI_WAGE:
        return state.wage
    if cfg.side is ThresholdSide.EPOP:
        return state.epop
    return math.nan


def threshold_policy(
    rule: Rule, params: RuleParams, cfg: Optional[ThresholdConfig] = None
) -> Policy:
    """Per-quarter policy: rule prescription, threshold latch, lower bound"""
    cfg = cfg or ThresholdConfig.inactive()
    if rule is Rule.OPTIMAL_CONTROL:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message="Optimal control paths are solved, not evaluated per quarter",
        )

    def policy(
        state: "ModelState",
        thresholds: ThresholdState,
        expected: "Expectations",
        _quarter: int,
    ) -> PolicyDecision:
        prescription = rule_rate(rule, state, params)
        if cfg.active:
            observation = ThresholdObservation(
                unrate=state.u, inflation_side=inflation_measure(state, expected, cfg)
            )
            thresholds = update_thresholds(thresholds, observation, cfg)
        rate = effective_rate(prescription, thresholds, cfg, params.elb, params.zlb)
        return PolicyDecision(
            rate=rate,
            rule_rate=prescription,
            thresholds=thresholds,
            floor=params.elb if params.zlb else None,
        )

    return policy


def anchored(params: RuleParams, r_star: float, pi_star: float, nairu: float) -> RuleParams:
    """Copy with the model's neutral rate, inflation target and NAIRU"""
    return replace(params, r_star=r_star, pi_star=pi_star, nairu=nairu)
