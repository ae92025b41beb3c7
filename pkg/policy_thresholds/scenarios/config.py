"""
Scenario files: TOML parsing, schema validation, variant merging and
conversion into the domain objects consumed by the runner.
"""

import copy
import dataclasses
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import marshmallow_dataclass
import pandas as pd
from marshmallow import ValidationError

from ..constants import (
    DEFAULT_DISCOUNT,
    DEFAULT_UNRATE_THRESH,
    FIXTURES_DIR,
    MIN_SCENARIO_HORIZON,
)
from ..macro_model import (
    ExpectationsMode,
    Fiscal,
    ModelParams,
    ModelState,
    Shock,
    ShockKind,
    output_gap_from_unrate,
    steady_state,
)
from ..optimal_control import PRESETS, OcWeights
from ..policy_rules import Rule, RuleParams, ThresholdConfig, ThresholdSide
from ..series_store import Frequency, parse_period
from ..util import ErrorCode, PolicyThresholdsException
from .schema import validate_scenario, validate_suite

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

MAIN_VARIANT = "main"


def _invalid(message: str) -> PolicyThresholdsException:
    return PolicyThresholdsException(code=ErrorCode.INVALID_SCENARIO, message=message)


def read_toml(path: str) -> Dict[str, Any]:
    """Parse a TOML file"""
    try:
        with open(path, "rb") as toml_file:
            return tomllib.load(toml_file)
    except OSError as err:
        raise PolicyThresholdsException(
            code=ErrorCode.IO_FAILURE, message=f"Cannot read {path}: {err}"
        ) from err
    except tomllib.TOMLDecodeError as err:
        raise _invalid(f"{path} is not a valid TOML file: {err}") from err


@marshmallow_dataclass.dataclass
class InitialConfig:
    """[initial]; omitted fields come from the steady state"""

    x: Optional[float] = None
    pi: Optional[float] = None
    pi_core: Optional[float] = None
    wage: Optional[float] = None
    u: Optional[float] = None
    lfpr: Optional[float] = None
    r: Optional[float] = None
    rg10: Optional[float] = None
    rgdp_growth: Optional[float] = None
    ptr: Optional[float] = None


@marshmallow_dataclass.dataclass
class ParamsConfig:
    """[params] overrides of the model parameters"""

    sigma: Optional[float] = None
    rho_x: Optional[float] = None
    kappa: Optional[float] = None
    lam: Optional[float] = field(default=None, metadata={"data_key": "lambda"})
    mu: Optional[float] = None
    phi: Optional[float] = None
    okun: Optional[float] = None
    nairu: Optional[float] = None
    r_star: Optional[float] = None
    pi_star: Optional[float] = None
    prod_growth: Optional[float] = None
    oil_passthrough: Optional[float] = None
    term_premium: Optional[float] = None
    lfpr_trend: Optional[float] = None
    lfpr_unrate_pass: Optional[float] = None
    potential_growth: Optional[float] = None
    fiscal_drag: Optional[float] = None


@marshmallow_dataclass.dataclass
class PolicyConfig:
    """[policy]"""

    rule: str = Rule.TAYLOR.value
    a_pi: Optional[float] = None
    a_y: Optional[float] = None
    inertia: Optional[float] = None
    u_gap_coeff: Optional[float] = None
    u_pi_coeff: Optional[float] = None
    u_pi_star_coeff: Optional[float] = None
    elb: Optional[float] = None
    zlb: Optional[bool] = None


@marshmallow_dataclass.dataclass
class ThresholdTableConfig:
    """[threshold]"""

    side: str = ThresholdSide.NONE.value
    value: Optional[float] = None
    unrate_thresh: Optional[float] = None


@marshmallow_dataclass.dataclass
class OcConfig:
    """[oc]"""

    preset: Optional[str] = None
    weights: Optional[List[float]] = None
    discount: Optional[float] = None
    horizon: Optional[int] = None
    grid: Optional[List[float]] = None


@marshmallow_dataclass.dataclass
class ShockConfig:
    """[[shocks]]"""

    kind: str
    start: str
    duration: Optional[int] = None
    path: Optional[List[float]] = None
    amount: Optional[float] = None
    basis_points: Optional[float] = None


@marshmallow_dataclass.dataclass
class ScenarioConfig:
    """One variant of a scenario file after merging its overrides"""

    name: str
    start: str
    horizon: int
    title: str = ""
    expectations: str = ExpectationsMode.VAR.value
    fiscal: str = Fiscal.NONE.value
    baseline: Optional[str] = None
    initial: InitialConfig = field(default_factory=InitialConfig)
    params: ParamsConfig = field(default_factory=ParamsConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    threshold: ThresholdTableConfig = field(default_factory=ThresholdTableConfig)
    oc: Optional[OcConfig] = None
    shocks: List[ShockConfig] = field(default_factory=list)


@dataclass(frozen=True)
class OcSettings:
    """Optimal-control loss and search settings"""

    weights: OcWeights
    horizon: int
    grid: Optional[Tuple[float, ...]] = None


@dataclass(frozen=True)
class ScenarioSpec:
    """Fully resolved simulation of one variant"""

    name: str
    variant: str
    title: str
    start: pd.Period
    horizon: int
    initial: ModelState
    params: ModelParams
    rule: Rule
    rule_params: RuleParams
    threshold: ThresholdConfig
    shocks: Tuple[Shock, ...] = ()
    expectations: ExpectationsMode = ExpectationsMode.VAR
    fiscal: Fiscal = Fiscal.NONE
    oc: Optional[OcSettings] = None

    def __post_init__(self):
        if self.horizon < MIN_SCENARIO_HORIZON:
            raise _invalid(
                f"Scenario {self.name}: horizon must be at least {MIN_SCENARIO_HORIZON}; "
                f"got: {self.horizon}"
            )
        for shock in self.shocks:
            if shock.start >= self.horizon:
                raise _invalid(
                    f"Scenario {self.name}: {shock.kind.value} shock starts after the horizon"
                )
        if self.rule is Rule.OPTIMAL_CONTROL and self.oc is None:
            raise _invalid(f"Scenario {self.name}: optimal control needs an [oc] table")


@dataclass(frozen=True)
class Scenario:
    """A scenario file: shared metadata and its variants in file order"""

    name: str
    title: str
    start: pd.Period
    horizon: int
    variants: Tuple[ScenarioSpec, ...]
    baseline: Optional[str] = None
    source: Optional[str] = None


@dataclass(frozen=True)
class SuiteEntry:
    """One manifest entry"""

    number: int
    path: str


def _present(config) -> Dict[str, Any]:
    return {
        key: value for key, value in dataclasses.asdict(config).items() if value is not None
    }


def _period(text: str) -> pd.Period:
    try:
        return parse_period(text, Frequency.QUARTERLY)
    except PolicyThresholdsException as err:
        raise _invalid(f"Invalid quarter: {text}") from err


def _initial_state(config: InitialConfig, params: ModelParams) -> ModelState:
    overrides = _present(config)
    if "x" not in overrides and "u" in overrides:
        overrides["x"] = output_gap_from_unrate(overrides["u"], params)
    return dataclasses.replace(steady_state(params), **overrides)


def _rule_params(config: PolicyConfig, rule: Rule, params: ModelParams) -> RuleParams:
    overrides = _present(config)
    overrides.pop("rule", None)
    base = RuleParams.modified(**overrides) if rule is Rule.MODIFIED else RuleParams(**overrides)
    return params.rule_params(base)


def _shock(config: ShockConfig, start: pd.Period, horizon: int, scenario: str) -> Shock:
    kind = ShockKind(config.kind)
    offset = (_period(config.start) - start).n
    if not 0 <= offset < horizon:
        raise _invalid(
            f"Scenario {scenario}: {kind.value} shock at {config.start} falls outside "
            f"the simulated quarters"
        )

    if kind is ShockKind.AGGREGATE_DEMAND:
        if not config.path:
            raise _invalid(f"Scenario {scenario}: aggregate_demand shock needs a path")
        return Shock(kind, start=offset, duration=config.duration, path=tuple(config.path))
    if kind is ShockKind.FFR_SURPRISE:
        if config.basis_points is None:
            raise _invalid(f"Scenario {scenario}: ffr_surprise shock needs basis_points")
        return Shock(kind, start=offset, duration=config.duration, amount=config.basis_points)
    if config.amount is None:
        raise _invalid(f"Scenario {scenario}: {kind.value} shock needs an amount")
    return Shock(kind, start=offset, duration=config.duration, amount=config.amount)


def _oc_settings(config: Optional[OcConfig], horizon: int, params: ModelParams):
    if config is None:
        return None
    if config.weights is not None:
        weights = OcWeights(*config.weights, discount=DEFAULT_DISCOUNT)
    else:
        weights = PRESETS[config.preset or "baseline"]
    weights = dataclasses.replace(
        weights,
        discount=config.discount if config.discount is not None else weights.discount,
        pi_target=params.pi_star,
        u_target=params.nairu,
    )
    oc_horizon = config.horizon or horizon
    if oc_horizon > horizon:
        raise _invalid(f"oc.horizon {oc_horizon} exceeds the scenario horizon {horizon}")
    grid = tuple(config.grid) if config.grid else None
    return OcSettings(weights=weights, horizon=oc_horizon, grid=grid)


def to_spec(config: ScenarioConfig, variant: str = MAIN_VARIANT) -> ScenarioSpec:
    """Convert a loaded variant into domain objects"""
    params = ModelParams(**_present(config.params))
    rule = Rule(config.policy.rule)
    start = _period(config.start)
    threshold = ThresholdConfig(
        unrate_thresh=config.threshold.unrate_thresh or DEFAULT_UNRATE_THRESH,
        side=ThresholdSide(config.threshold.side),
        value=config.threshold.value,
    )
    return ScenarioSpec(
        name=config.name,
        variant=variant,
        title=config.title,
        start=start,
        horizon=config.horizon,
        initial=_initial_state(config.initial, params),
        params=params,
        rule=rule,
        rule_params=_rule_params(config.policy, rule, params),
        threshold=threshold,
        shocks=tuple(
            _shock(shock, start, config.horizon, config.name) for shock in config.shocks
        ),
        expectations=ExpectationsMode(config.expectations),
        fiscal=Fiscal(config.fiscal),
        oc=_oc_settings(config.oc, config.horizon, params),
    )


def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Tables merge key by key; other values are replaced"""
    merged = copy.deepcopy(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _load_config(data: Dict[str, Any], source: str) -> ScenarioConfig:
    try:
        return ScenarioConfig.Schema().load(data)
    except (AttributeError, KeyError, TypeError, ValidationError) as err:
        raise _invalid(f"Invalid scenario file {source}: {err}") from err


def _resolve_baseline(name: Optional[str], source: Optional[str]) -> Optional[str]:
    if name is None or os.path.isabs(name):
        return name
    if source is not None:
        beside = os.path.join(os.path.dirname(os.path.abspath(source)), name)
        if os.path.isfile(beside):
            return beside
    return os.path.join(FIXTURES_DIR, name)


def _variant_data(base: Dict[str, Any], table: Dict[str, Any]) -> Dict[str, Any]:
    """Base scenario with a variant's overrides; a new threshold side drops the old value"""
    threshold = table.get("threshold", {})
    if "side" in threshold and "value" not in threshold and "threshold" in base:
        base = {
            **base,
            "threshold": {
                key: value for key, value in base["threshold"].items() if key != "value"
            },
        }
    return _merge(base, table)


def scenario_from_dict(data: Dict[str, Any], source: Optional[str] = None) -> Scenario:
    """Validate a parsed scenario and resolve all of its variants"""
    label = source or "<scenario>"
    validate_scenario(data, label)
    base = {key: value for key, value in data.items() if key != "variants"}
    overrides = data.get("variants") or {MAIN_VARIANT: {}}

    variants = tuple(
        to_spec(_load_config(_variant_data(base, table), label), variant)
        for variant, table in overrides.items()
    )
    first = variants[0]
    return Scenario(
        name=first.name,
        title=first.title,
        start=first.start,
        horizon=first.horizon,
        variants=variants,
        baseline=_resolve_baseline(data.get("baseline"), source),
        source=source,
    )


def load_scenario(path: str) -> Scenario:
    """Read, validate and resolve a scenario TOML file"""
    return scenario_from_dict(read_toml(path), path)


def load_suite(path: str) -> List[SuiteEntry]:
    """Manifest entries in file order; paths are relative to the manifest"""
    data = read_toml(path)
    validate_suite(data, path)
    directory = os.path.dirname(os.path.abspath(path))
    return [
        SuiteEntry(number=entry["number"], path=os.path.join(directory, entry["file"]))
        for entry in data["scenarios"]
    ]
