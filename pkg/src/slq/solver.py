"""
Sequential linear-quadratic trajectory optimization

Each iteration linearizes the dynamics around the current rollout, solves
the resulting LQ problem with a Riccati sweep and applies the new affine
controller with a backtracking line search on the true cost.
"""
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from src.deriv.engine import Provider
from src.slq.problem import AffineController, SlqProblem
from src.slq.riccati import quadratize_cost, riccati_backward_pass, trajectory_cost
from src.slq.rollout import Trajectory, linearize_along_trajectory, rollout
from src.utils.errors import DivergedRollout, RiccatiFailure, SingularOrientation
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class SlqIteration:
    """Bookkeeping for one accepted (or final rejected) iteration"""

    iteration: int
    cost: float
    step: float
    regularization: float
    linearization_seconds: float
    backward_seconds: float
    line_search_seconds: float

    @property
    def total_seconds(self) -> float:
        return self.linearization_seconds + self.backward_seconds + self.line_search_seconds


@dataclass(frozen=True, eq=False)
class SlqSolution:
    """Best iterate and its history"""

    states: np.ndarray
    inputs: np.ndarray
    feedback_gains: np.ndarray
    feedforward: np.ndarray
    cost_history: List[float]
    iterations: List[SlqIteration] = field(default_factory=list)
    converged: bool = False
    provider: Provider = Provider.COMPILED_AD

    @property
    def cost(self) -> float:
        return self.cost_history[-1]

    @property
    def total_seconds(self) -> float:
        return sum(it.total_seconds for it in self.iterations)

    @property
    def linearization_seconds(self) -> float:
        return sum(it.linearization_seconds for it in self.iterations)


def _backward_with_regularization(problem: SlqProblem, dynamics, cost_model, mu: float):
    options = problem.options
    while True:
        try:
            return riccati_backward_pass(dynamics, cost_model, mu)
        except RiccatiFailure:
            mu = max(options.mu_min, mu * options.mu_increase)
            if mu > options.mu_max:
                logger.error(f"Riccati pass still indefinite at mu={mu:g}; giving up")
                raise
            logger.warning(f"Quadratic model indefinite, increasing regularization to {mu:g}")


def _try_rollout(problem: SlqProblem, controller: AffineController) -> Optional[Trajectory]:
    try:
        return rollout(problem, controller)
    except (DivergedRollout, SingularOrientation) as exc:
        logger.debug(f"Rejected trial rollout: {exc}")
        return None


def slq_solve(
    problem: SlqProblem,
    provider: Provider = Provider.COMPILED_AD,
    max_iterations: Optional[int] = None,
    tolerance: Optional[float] = None,
    threads: int = 1,
) -> SlqSolution:
    """
    Optimize the problem's trajectory

    Args:
        problem: SLQ problem with its initial controller
        provider: Derivative provider for the linearization
        max_iterations: Overrides the problem's solver options
        tolerance: Relative cost decrease below which the solve stops
        threads: Worker threads for the linearization

    Returns:
        SlqSolution holding the best iterate; cost_history is non-increasing

    Raises:
        DivergedRollout: The initial rollout leaves the admissible region
        RiccatiFailure: Regularization exhausted
    """
    provider = Provider(provider)
    options = problem.options
    max_iterations = options.max_iterations if max_iterations is None else max_iterations
    tolerance = options.tolerance if tolerance is None else tolerance

    controller = problem.initial_controller
    trajectory = rollout(problem, controller)
    cost = trajectory_cost(problem, trajectory)
    history = [cost]
    iterations: List[SlqIteration] = []
    mu = 0.0
    converged = False
    logger.info(f"SLQ '{problem.name}' ({provider.value}): initial cost {cost:.6g}")

    for iteration in range(1, max_iterations + 1):
        started = time.perf_counter()
        dynamics = linearize_along_trajectory(problem, trajectory, provider, threads)
        linearized = time.perf_counter()
        result = _backward_with_regularization(problem, dynamics, quadratize_cost(problem, trajectory), mu)
        mu = result.regularization
        backward = time.perf_counter()

        step = 1.0
        accepted = None
        while step >= options.min_step:
            trial_controller = AffineController(
                u_ff=trajectory.inputs + step * result.k,
                K=result.K,
                x_ref=trajectory.states[:-1],
            )
            trial = _try_rollout(problem, trial_controller)
            if trial is not None:
                trial_cost = trajectory_cost(problem, trial)
                if trial_cost < cost:
                    accepted = (trial_controller, trial, trial_cost)
                    break
            step *= options.line_search_factor
        searched = time.perf_counter()

        if accepted is None:
            converged = abs(result.expected_linear) <= tolerance * max(1.0, abs(cost))
            if not converged:
                logger.warning(f"SLQ iteration {iteration}: line search found no decrease; stopping")
            break

        controller, trajectory, new_cost = accepted
        decrease = cost - new_cost
        cost = new_cost
        history.append(cost)
        iterations.append(
            SlqIteration(
                iteration=iteration,
                cost=cost,
                step=step,
                regularization=mu,
                linearization_seconds=linearized - started,
                backward_seconds=backward - linearized,
                line_search_seconds=searched - backward,
            )
        )
        logger.info(f"SLQ iteration {iteration}: cost {cost:.6g}, step {step:g}, mu {mu:g}")

        mu = mu / options.mu_decrease
        if mu < options.mu_min:
            mu = 0.0
        if decrease <= tolerance * max(1.0, abs(cost)):
            converged = True
            break

    return SlqSolution(
        states=trajectory.states,
        inputs=trajectory.inputs,
        feedback_gains=controller.K,
        feedforward=controller.u_ff,
        cost_history=history,
        iterations=iterations,
        converged=converged,
        provider=provider,
    )


__all__ = ["SlqIteration", "SlqSolution", "slq_solve"]
