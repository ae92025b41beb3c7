"""
Optimal-control policy-rate paths: discounted quadratic loss over inflation,
unemployment and rate changes, minimized subject to the lower bound.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .constants import (
    BRUTE_FORCE_CHUNK,
    BRUTE_FORCE_MAX_PATHS,
    DEFAULT_DISCOUNT,
    DEFAULT_ELB,
    DEFAULT_NAIRU,
    DEFAULT_PI_STAR,
    OC_HYPERCUBE_MAX_HORIZON,
    OC_ITERATION_CAP,
    OC_PENALTY_SWEEPS,
    OC_PENALTY_WEIGHT,
    OC_PERTURBATION,
    OC_TOLERANCE,
)
from .macro_model import (
    Fiscal,
    ModelParams,
    ModelState,
    Shock,
    VarExpectations,
    simulate,
    spectral_radius,
    transition_matrix,
)
from .policy_rules import (
    Policy,
    PolicyDecision,
    Rule,
    RuleParams,
    ThresholdConfig,
    threshold_policy,
)
from .util import (
    ErrorCode,
    NonConvergenceException,
    PolicyThresholdsException,
    UnstableModelException,
    check_range,
    warn,
)

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class OcWeights:
    """Loss weights on inflation, unemployment and rate changes"""

    w_pi: float
    w_u: float
    w_r: float
    discount: float = DEFAULT_DISCOUNT
    pi_target: float = DEFAULT_PI_STAR
    u_target: float = DEFAULT_NAIRU

    def __post_init__(self):
        for name in ("w_pi", "w_u", "w_r"):
            check_range(name, getattr(self, name), 0.0)
        if max(self.w_pi, self.w_u, self.w_r) <= 0:
            raise PolicyThresholdsException(
                code=ErrorCode.INVALID_PARAMS,
                message="At least one loss weight must be positive",
            )
        check_range("discount", self.discount, 0.0, 1.0, low_open=True)
        check_range("pi_target", self.pi_target)
        check_range("u_target", self.u_target, 0.0)

    def scaled(self, factor: float) -> "OcWeights":
        """All three weights multiplied by a positive factor"""
        return OcWeights(
            w_pi=self.w_pi * factor,
            w_u=self.w_u * factor,
            w_r=self.w_r * factor,
            discount=self.discount,
            pi_target=self.pi_target,
            u_target=self.u_target,
        )


PRESETS: Dict[str, OcWeights] = {
    "baseline": OcWeights(w_pi=1.0, w_u=1.0, w_r=10.0),
    "inflation_focus": OcWeights(w_pi=10.0, w_u=5.0, w_r=5.0),
}


def oc_loss(
    states: Sequence[ModelState],
    rates: Sequence[float],
    weights: OcWeights,
    initial_rate: float,
) -> float:
    """
    sum_t discount^t (w_pi (pi_t - pi*)^2 + w_u (u_t - u*)^2 + w_r (r_t - r_{t-1})^2),
    with r_{-1} = initial_rate and t running over exactly the supplied quarters.
    """
    if len(states) == 0 or len(states) != len(rates):
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message="Loss needs a nonempty trajectory with one rate per quarter",
        )
    pi = np.array([state.pi for state in states])
    u = np.array([state.u for state in states])
    path = np.asarray(rates, dtype=float)
    changes = np.diff(np.concatenate([[initial_rate], path]))
    discounts = weights.discount ** np.arange(len(states))
    return float(
        np.sum(
            discounts
            * (
                weights.w_pi * (pi - weights.pi_target) ** 2
                + weights.w_u * (u - weights.u_target) ** 2
                + weights.w_r * changes**2
            )
        )
    )


def oc_policy(path: Sequence[float]) -> Policy:
    """Policy that sets the given rates in order, holding the last one afterwards"""
    rates = [float(rate) for rate in path]
    if not rates:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS, message="Empty policy-rate path"
        )

    def policy(_state, thresholds, _expected, quarter: int) -> PolicyDecision:
        rate = rates[min(quarter, len(rates) - 1)]
        return PolicyDecision(rate=rate, rule_rate=rate, thresholds=thresholds)

    return policy


@dataclass(frozen=True)
class OcProblem:
    """Everything a rate path is evaluated against"""

    initial: ModelState
    params: ModelParams
    shocks: Tuple[Shock, ...]
    horizon: int
    weights: OcWeights
    expectations: VarExpectations
    fiscal: Fiscal = Fiscal.NONE

    def simulate(self, path: Sequence[float]):
        """Trajectory under a fixed rate path"""
        return simulate(
            self.initial,
            self.params,
            oc_policy(path),
            self.shocks,
            self.horizon,
            self.expectations,
            fiscal=self.fiscal,
            check_stability=False,
        )

    def loss(self, path: Sequence[float]) -> float:
        """Loss of simulating a fixed rate path"""
        trajectory = self.simulate(path)
        return oc_loss(trajectory.states, trajectory.rates, self.weights, self.initial.r)


class ResponseModel:
    """
    Inflation and unemployment are affine in the rate path, so the loss is
    ||c + M p||^2 with M and c built from horizon + 1 simulations around `anchor`.
    The anchor defaults to the neutral rate; it should keep unemployment off its floor.
    """

    def __init__(self, problem: OcProblem, anchor: Optional[Sequence[float]] = None):
        horizon = problem.horizon
        weights = problem.weights
        if anchor is None:
            anchor = np.full(horizon, problem.params.r_star + problem.params.pi_star)
        anchor = np.asarray(anchor, dtype=float)
        base = problem.simulate(anchor)
        pi_response = np.empty((horizon, horizon))
        u_response = np.empty((horizon, horizon))
        for column in range(horizon):
            bumped = problem.simulate(anchor + np.eye(horizon)[column])
            pi_response[:, column] = bumped.variable("pi") - base.variable("pi")
            u_response[:, column] = bumped.variable("u") - base.variable("u")
        pi0 = base.variable("pi") - pi_response @ anchor
        u0 = base.variable("u") - u_response @ anchor

        root_discounts = np.sqrt(weights.discount ** np.arange(horizon))
        differences = np.eye(horizon) - np.eye(horizon, k=-1)
        first_change = np.zeros(horizon)
        first_change[0] = -problem.initial.r

        scale_pi = np.sqrt(weights.w_pi) * root_discounts
        scale_u = np.sqrt(weights.w_u) * root_discounts
        scale_r = np.sqrt(weights.w_r) * root_discounts
        self.matrix = np.vstack(
            [
                scale_pi[:, None] * pi_response,
                scale_u[:, None] * u_response,
                scale_r[:, None] * differences,
            ]
        )
        self.offset = np.concatenate(
            [
                scale_pi * (pi0 - weights.pi_target),
                scale_u * (u0 - weights.u_target),
                scale_r * first_change,
            ]
        )
        self.quadratic = self.matrix.T @ self.matrix
        self.linear = self.matrix.T @ self.offset
        self.horizon = horizon

    def loss(self, path: Sequence[float]) -> float:
        """Loss of one path"""
        residual = self.offset + self.matrix @ np.asarray(path, dtype=float)
        return float(residual @ residual)

    def losses(self, paths: np.ndarray) -> np.ndarray:
        """Loss of each row of `paths`"""
        residuals = self.offset[None, :] + paths @ self.matrix.T
        return np.einsum("ij,ij->i", residuals, residuals)

    def coordinate_term(self, path: np.ndarray, index: int) -> float:
        """Linear coefficient of path[index] with the other coordinates fixed"""
        return float(
            self.linear[index]
            + self.quadratic[index] @ path
            - self.quadratic[index, index] * path[index]
        )


@dataclass(frozen=True)
class OcSolution:
    """Chosen rate path with solver bookkeeping"""

    path: Tuple[float, ...]
    loss: float
    start_losses: Tuple[float, ...]
    sweeps: int
    converged: bool


def _check_problem(problem: OcProblem, rule_params: Optional[RuleParams]):
    if problem.horizon < 1:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"horizon must be a positive integer; got: {problem.horizon}",
        )
    radius = spectral_radius(
        transition_matrix(problem.params, problem.expectations, rule_params)
    )
    if radius >= 1.0:
        raise UnstableModelException(radius)


def _descend(
    model: ResponseModel, start: np.ndarray, elb: float
) -> Tuple[np.ndarray, int, bool]:
    """Projected coordinate descent after an exterior-penalty warm-up"""
    path = np.array(start, dtype=float)
    diagonal = np.diag(model.quadratic)

    for _ in range(OC_PENALTY_SWEEPS):
        for index in range(model.horizon):
            if diagonal[index] <= TIE_TOLERANCE:
                continue
            term = model.coordinate_term(path, index)
            candidate = -term / diagonal[index]
            if candidate < elb:
                candidate = (OC_PENALTY_WEIGHT * elb - term) / (
                    diagonal[index] + OC_PENALTY_WEIGHT
                )
            path[index] = candidate
    path = np.maximum(path, elb)

    previous = model.loss(path)
    for sweep in range(1, OC_ITERATION_CAP + 1):
        for index in range(model.horizon):
            if diagonal[index] <= TIE_TOLERANCE:
                continue
            term = model.coordinate_term(path, index)
            path[index] = max(-term / diagonal[index], elb)
        current = model.loss(path)
        if abs(previous - current) < OC_TOLERANCE:
            return path, sweep, True
        previous = current
    return path, OC_ITERATION_CAP, False


def _grid_descent(
    model: ResponseModel, start: np.ndarray, grid: np.ndarray
) -> Tuple[np.ndarray, int]:
    """Discrete coordinate descent then a hypercube neighbourhood search, over grid indices"""
    indices = np.abs(start[:, None] - grid[None, :]).argmin(axis=1)
    sweeps = 0
    changed = True
    while changed and sweeps < OC_ITERATION_CAP:
        changed = False
        sweeps += 1
        for coordinate in range(model.horizon):
            candidates = np.tile(grid[indices], (grid.size, 1))
            candidates[:, coordinate] = grid
            best = int(np.argmin(model.losses(candidates)))
            if best != indices[coordinate]:
                current = model.loss(grid[indices])
                if model.loss(candidates[best]) < current - TIE_TOLERANCE:
                    indices[coordinate] = best
                    changed = True

    radius = _hypercube_radius(model.horizon)
    if radius:
        offsets = np.array(
            list(itertools.product(range(-radius, radius + 1), repeat=model.horizon))
        )
        improved = True
        while improved and sweeps < OC_ITERATION_CAP:
            sweeps += 1
            neighbours = np.clip(indices[None, :] + offsets, 0, grid.size - 1)
            losses = model.losses(grid[neighbours])
            best = _lexicographic_best(grid[neighbours], losses)
            improved = losses[best] < model.loss(grid[indices]) - TIE_TOLERANCE
            if improved:
                indices = neighbours[best]
    return grid[indices], sweeps


def _hypercube_radius(horizon: int) -> int:
    if 5**horizon <= 100_000:
        return 2
    if horizon <= OC_HYPERCUBE_MAX_HORIZON:
        return 1
    return 0


def _lexicographic_best(paths: np.ndarray, losses: np.ndarray) -> int:
    """Lowest loss; among near-ties the lexicographically smallest path"""
    lowest = float(np.min(losses))
    tied = np.flatnonzero(losses <= lowest + TIE_TOLERANCE)
    return min(tied, key=lambda row: tuple(paths[row]))


def _taylor_path(problem: OcProblem, rule_params: RuleParams) -> np.ndarray:
    policy = threshold_policy(Rule.TAYLOR, rule_params, ThresholdConfig.inactive())
    trajectory = simulate(
        problem.initial,
        problem.params,
        policy,
        problem.shocks,
        problem.horizon,
        problem.expectations,
        fiscal=problem.fiscal,
        check_stability=False,
    )
    return trajectory.rates


def _starts(
    problem: OcProblem,
    rule_params: RuleParams,
    elb: float,
    extra_starts: Iterable[Sequence[float]],
) -> List[np.ndarray]:
    horizon = problem.horizon
    neutral = problem.params.r_star + problem.params.pi_star
    taylor_path = np.maximum(_taylor_path(problem, rule_params), elb)
    starts = [
        np.full(horizon, elb),
        taylor_path,
        np.full(horizon, max(neutral, elb)),
        np.maximum(taylor_path + OC_PERTURBATION, elb),
        np.maximum(taylor_path - OC_PERTURBATION, elb),
    ]
    for extra in extra_starts:
        extra = np.asarray(extra, dtype=float)
        if extra.shape != (horizon,):
            raise PolicyThresholdsException(
                code=ErrorCode.INVALID_PARAMS,
                message=f"Extra start must have {horizon} rates",
            )
        starts.append(np.maximum(extra, elb))
    return starts


def solve_oc(
    initial: ModelState,
    params: ModelParams,
    shocks: Sequence[Shock],
    horizon: int,
    weights: OcWeights,
    e: VarExpectations,
    elb: float = DEFAULT_ELB,
    *,
    grid: Optional[Sequence[float]] = None,
    extra_starts: Iterable[Sequence[float]] = (),
    fiscal: Fiscal = Fiscal.NONE,
    rule_params: Optional[RuleParams] = None,
) -> OcSolution:
    """
    Multi-start minimization of the loss over rate paths bounded below by `elb`.
    With `grid`, the search is restricted to grid values at or above the bound.
    """
    problem = OcProblem(initial, params, tuple(shocks), horizon, weights, e, fiscal)
    rule_params = params.rule_params(rule_params)
    _check_problem(problem, rule_params)
    starts = _starts(problem, rule_params, elb, extra_starts)
    # second start is the bounded Taylor path
    model = ResponseModel(problem, anchor=starts[1])

    candidates = []
    for number, start in enumerate(starts):
        path, sweeps, converged = _descend(model, start, elb)
        candidates.append((path, model.loss(path), sweeps, converged))
        logger.debug(
            "OC start %d: loss=%.10g sweeps=%d converged=%s",
            number,
            candidates[-1][1],
            sweeps,
            converged,
        )

    if grid is not None:
        grid_values = np.unique(np.asarray(grid, dtype=float))
        grid_values = grid_values[grid_values >= elb]
        if grid_values.size == 0:
            raise PolicyThresholdsException(
                code=ErrorCode.INVALID_PARAMS,
                message=f"Rate grid has no value at or above the bound {elb}",
            )
        best_continuous = candidates[
            _lexicographic_best(
                np.array([item[0] for item in candidates]),
                np.array([item[1] for item in candidates]),
            )
        ][0]
        candidates = [
            (path, model.loss(path), sweeps, True)
            for path, sweeps in (
                _grid_descent(model, start, grid_values)
                for start in [*starts, best_continuous]
            )
        ]

    paths = np.array([item[0] for item in candidates])
    losses = np.array([item[1] for item in candidates])
    best = _lexicographic_best(paths, losses)
    path, loss, sweeps, converged = candidates[best]

    if not converged:
        warn(f"Optimal-control solver hit the cap of {OC_ITERATION_CAP} sweeps.")
        raise NonConvergenceException(sweeps, path, loss)

    return OcSolution(
        path=tuple(float(rate) for rate in path),
        loss=problem.loss(path),
        start_losses=tuple(float(value) for value in losses),
        sweeps=int(sum(item[2] for item in candidates)),
        converged=True,
    )


def brute_force_oc(
    initial: ModelState,
    params: ModelParams,
    shocks: Sequence[Shock],
    horizon: int,
    weights: OcWeights,
    e: VarExpectations,
    grid: Sequence[float],
    *,
    fiscal: Fiscal = Fiscal.NONE,
) -> OcSolution:
    """Exhaustive search over all grid paths; ties go to the lexicographically lowest path"""
    grid_values = np.unique(np.asarray(grid, dtype=float))
    if grid_values.size == 0:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS, message="Empty rate grid"
        )
    if horizon < 1:
        raise PolicyThresholdsException(
            code=ErrorCode.INVALID_PARAMS,
            message=f"horizon must be a positive integer; got: {horizon}",
        )
    n_paths = grid_values.size**horizon
    if n_paths > BRUTE_FORCE_MAX_PATHS:
        raise PolicyThresholdsException(
            code=ErrorCode.SEARCH_SPACE_TOO_LARGE,
            message=f"{grid_values.size}^{horizon} = {n_paths} paths exceed "
            f"the limit of {BRUTE_FORCE_MAX_PATHS}",
        )

    problem = OcProblem(initial, params, tuple(shocks), horizon, weights, e, fiscal)
    model = ResponseModel(problem)
    best_path: Optional[np.ndarray] = None
    best_loss = np.inf
    paths = itertools.product(grid_values, repeat=horizon)
    while True:
        chunk = np.array(list(itertools.islice(paths, BRUTE_FORCE_CHUNK)))
        if chunk.size == 0:
            break
        losses = model.losses(chunk)
        # paths arrive in lexicographic order, so the first near-minimum wins
        index = int(np.flatnonzero(losses <= losses.min() + TIE_TOLERANCE)[0])
        if losses[index] < best_loss - TIE_TOLERANCE:
            best_loss = float(losses[index])
            best_path = chunk[index]

    return OcSolution(
        path=tuple(float(rate) for rate in best_path),
        loss=problem.loss(best_path),
        start_losses=(best_loss,),
        sweeps=0,
        converged=True,
    )
