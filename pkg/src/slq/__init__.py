"""Sequential linear-quadratic trajectory optimization"""
from src.slq.problem import (
    AffineController,
    InitialController,
    SlqProblem,
    SlqProblemConfig,
    SlqSolverOptions,
    build_problem,
    initial_controller,
    load_problem,
    load_problem_config,
)
from src.slq.riccati import (
    BackwardPassResult,
    CostApproximation,
    quadratize_cost,
    riccati_backward_pass,
    trajectory_cost,
)
from src.slq.rollout import (
    LinearizedTrajectory,
    Trajectory,
    linearize_along_trajectory,
    linearize_step,
    rk4_step,
    rollout,
)
from src.slq.solver import SlqIteration, SlqSolution, slq_solve

__all__ = [
    "AffineController",
    "InitialController",
    "SlqProblem",
    "SlqProblemConfig",
    "SlqSolverOptions",
    "build_problem",
    "initial_controller",
    "load_problem",
    "load_problem_config",
    "BackwardPassResult",
    "CostApproximation",
    "quadratize_cost",
    "riccati_backward_pass",
    "trajectory_cost",
    "LinearizedTrajectory",
    "Trajectory",
    "linearize_along_trajectory",
    "linearize_step",
    "rk4_step",
    "rollout",
    "SlqIteration",
    "SlqSolution",
    "slq_solve",
]
