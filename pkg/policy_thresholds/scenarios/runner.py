"""
Scenario execution, variant comparison and the parallel suite runner.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .. import SIM_THREADS
from ..constants import (
    BASELINE_VARIANT,
    DEFAULT_ELB,
    DEFAULT_THREADS_CAP,
    REPORTED_VARIABLES,
    VAR_EXPECTATIONS_PATH,
)
from ..macro_model import Trajectory, VarExpectations, load_var_expectations, simulate
from ..optimal_control import OcSolution, oc_policy, solve_oc
from ..policy_rules import Rule, liftoff_quarter, threshold_policy
from ..series_store import format_period, load_panel, panel_frame
from ..util import ErrorCode, PolicyThresholdsException, warn
from .config import Scenario, ScenarioSpec, load_scenario, load_suite

logger = logging.getLogger(__name__)


@lru_cache
def default_var_expectations() -> VarExpectations:
    """The bundled expectations VAR"""
    return load_var_expectations(VAR_EXPECTATIONS_PATH)


@dataclass(frozen=True)
class VariantPaths:
    """Reported variables of one variant over the scenario quarters"""

    name: str
    start: pd.Period
    series: Dict[str, np.ndarray]
    liftoff: Optional[int]
    simulated: bool = True

    @property
    def horizon(self) -> int:
        """Number of quarters"""
        return len(self.series[REPORTED_VARIABLES[0]])

    @property
    def periods(self) -> List[pd.Period]:
        """Quarter of every observation"""
        return [self.start + quarter for quarter in range(self.horizon)]

    @property
    def liftoff_period(self) -> Optional[pd.Period]:
        """Quarter of liftoff, None if the rate stays at the bound"""
        return None if self.liftoff is None else self.start + self.liftoff


@dataclass(frozen=True)
class RunResult:
    """Simulation of one variant"""

    spec: ScenarioSpec
    trajectory: Trajectory
    paths: VariantPaths
    oc: Optional[OcSolution] = None


@dataclass(frozen=True)
class ComparisonResult:
    """Aligned variants with liftoff quarters and peak deviations from the first variant"""

    title: str
    variants: Tuple[VariantPaths, ...]
    liftoff: Dict[str, Optional[pd.Period]]
    peak_deviations: Dict[str, Dict[str, float]]

    @property
    def base(self) -> str:
        """Variant deviations are measured against"""
        return self.variants[0].name

    @property
    def names(self) -> List[str]:
        """Variant names in order"""
        return [variant.name for variant in self.variants]

    def variant(self, name: str) -> VariantPaths:
        """Variant by name"""
        for variant in self.variants:
            if variant.name == name:
                return variant
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS, message=f"No variant named {name}"
        )


def _policy_for(spec: ScenarioSpec, e: VarExpectations):
    if spec.rule is not Rule.OPTIMAL_CONTROL:
        return threshold_policy(spec.rule, spec.rule_params, spec.threshold), None

    solution = solve_oc(
        spec.initial,
        spec.params,
        spec.shocks,
        spec.oc.horizon,
        spec.oc.weights,
        e,
        spec.rule_params.elb,
        grid=spec.oc.grid,
        fiscal=spec.fiscal,
        rule_params=spec.rule_params,
    )
    logger.info("%s/%s: optimal loss %.6g", spec.name, spec.variant, solution.loss)
    return oc_policy(solution.path), solution


def run_scenario(spec: ScenarioSpec, e: Optional[VarExpectations] = None) -> RunResult:
    """Simulate one variant and locate its liftoff"""
    e = e or default_var_expectations()
    policy, solution = _policy_for(spec, e)
    trajectory = simulate(
        spec.initial,
        spec.params,
        policy,
        spec.shocks,
        spec.horizon,
        e,
        expectations=spec.expectations,
        fiscal=spec.fiscal,
        rule_params=spec.rule_params,
    )
    paths = VariantPaths(
        name=spec.variant,
        start=spec.start,
        series={name: trajectory.variable(name) for name in REPORTED_VARIABLES},
        liftoff=liftoff_quarter(trajectory.rates, spec.rule_params.elb),
    )
    logger.info(
        "%s/%s: liftoff %s",
        spec.name,
        spec.variant,
        "none" if paths.liftoff_period is None else format_period(paths.liftoff_period),
    )
    return RunResult(spec=spec, trajectory=trajectory, paths=paths, oc=solution)


def load_baseline(
    path: str, start: pd.Period, horizon: int, elb: float = DEFAULT_ELB
) -> VariantPaths:
    """
    Consensus path read from CSV from `start` on.
    Shorter files are padded with their last row, longer ones truncated.
    """
    panel = load_panel(path, REPORTED_VARIABLES, start=start)
    if panel.start != start:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_SCENARIO,
            message=f"Baseline {path} starts at {format_period(panel.start)}, "
            f"after the scenario start {format_period(start)}",
        )
    frame = panel_frame(panel)
    if frame.isna().to_numpy().any():
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_SERIES, message=f"Baseline {path} has missing values"
        )
    values = frame.to_numpy(dtype=float)[:horizon]
    if values.shape[0] < horizon:
        values = np.vstack([values, np.repeat(values[-1:], horizon - values.shape[0], axis=0)])

    series = {name: values[:, column] for column, name in enumerate(REPORTED_VARIABLES)}
    return VariantPaths(
        name=BASELINE_VARIANT,
        start=start,
        series=series,
        liftoff=liftoff_quarter(series["ffr"], elb),
        simulated=False,
    )


def _comparison(title: str, variants: Sequence[VariantPaths]) -> ComparisonResult:
    horizons = {variant.horizon for variant in variants}
    starts = {variant.start for variant in variants}
    if len(horizons) > 1 or len(starts) > 1:
        raise PolicyThresholdsException(
            code=ErrorCode.MISMATCHED_HORIZONS,
            message="Compared variants must share start and horizon; got: "
            + ", ".join(
                f"{variant.name} {format_period(variant.start)}+{variant.horizon}"
                for variant in variants
            ),
        )
    names = [variant.name for variant in variants]
    if len(set(names)) != len(names):
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"Variant names must be unique; got: {', '.join(names)}",
        )

    base = variants[0]
    return ComparisonResult(
        title=title,
        variants=tuple(variants),
        liftoff={variant.name: variant.liftoff_period for variant in variants},
        peak_deviations={
            variant.name: {
                name: float(np.max(np.abs(variant.series[name] - base.series[name])))
                for name in REPORTED_VARIABLES
            }
            for variant in variants
        },
    )


def compare(variants: Sequence[VariantPaths], title: str = "") -> ComparisonResult:
    """Align at least two variants; deviations are taken from the first"""
    if len(variants) < 2:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"Comparison needs at least two variants; got: {len(variants)}",
        )
    return _comparison(title, variants)


def run(scenario: Scenario, e: Optional[VarExpectations] = None) -> ComparisonResult:
    """All variants of a scenario, led by the consensus baseline when one is configured"""
    variants = []
    if scenario.baseline:
        variants.append(load_baseline(scenario.baseline, scenario.start, scenario.horizon))
    variants.extend(run_scenario(spec, e).paths for spec in scenario.variants)
    return _comparison(scenario.title or scenario.name, variants)


def compare_scenarios(
    base: Scenario, others: Sequence[Scenario], e: Optional[VarExpectations] = None
) -> ComparisonResult:
    """
    The first variant of `base` against every simulated variant of `others`,
    labelled `<scenario>/<variant>`.
    """
    base_result = run(base, e)
    variants = [_relabel(base_result.variants[0], f"{base.name}/{base_result.base}")]
    for scenario in others:
        for paths in run(scenario, e).variants:
            if paths.simulated:
                variants.append(_relabel(paths, f"{scenario.name}/{paths.name}"))
    return compare(variants, title=f"{base.name} vs " + ", ".join(s.name for s in others))


def _relabel(paths: VariantPaths, name: str) -> VariantPaths:
    return VariantPaths(
        name=name,
        start=paths.start,
        series=paths.series,
        liftoff=paths.liftoff,
        simulated=paths.simulated,
    )


def suite_threads() -> int:
    """Worker count: SIM_THREADS when set, else min(4, CPU count)"""
    cpus = os.cpu_count() or 1
    if SIM_THREADS is None:
        return min(DEFAULT_THREADS_CAP, cpus)
    if SIM_THREADS > cpus:
        warn(f"SIM_THREADS={SIM_THREADS} exceeds the {cpus} available CPUs.")
    return SIM_THREADS


@dataclass(frozen=True)
class SuiteResult:
    """One manifest entry with its outcome"""

    number: int
    scenario: Scenario
    result: ComparisonResult


def run_suite(
    manifest: str,
    e: Optional[VarExpectations] = None,
    threads: Optional[int] = None,
) -> List[SuiteResult]:
    """Run every manifest scenario in parallel; results come back in manifest order"""
    entries = load_suite(manifest)
    scenarios = [load_scenario(entry.path) for entry in entries]
    e = e or default_var_expectations()
    workers = min(threads or suite_threads(), len(scenarios))
    logger.info("Running %d scenarios on %d threads", len(scenarios), workers)

    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(lambda scenario: run(scenario, e), scenarios))

    return [
        SuiteResult(number=entry.number, scenario=scenario, result=result)
        for entry, scenario, result in zip(entries, scenarios, results)
    ]
