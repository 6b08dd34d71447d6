"""
Quadratic cost model and the Riccati backward pass
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from src.slq.problem import SlqProblem
from src.slq.rollout import LinearizedTrajectory, Trajectory
from src.utils.errors import RiccatiFailure
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class CostApproximation:
    """
    Per-step gradients/Hessians of the stage cost, plus the terminal cost

    l_x (N × nx), l_u (N × nu), l_xx (N × nx × nx), l_uu (N × nu × nu),
    l_ux (N × nu × nx), terminal gradient V_x (nx) and Hessian V_xx (nx × nx).
    """

    l_x: np.ndarray
    l_u: np.ndarray
    l_xx: np.ndarray
    l_uu: np.ndarray
    l_ux: np.ndarray
    terminal_x: np.ndarray
    terminal_xx: np.ndarray


@dataclass(frozen=True, eq=False)
class BackwardPassResult:
    """Feedback gains K (N × nu × nx), feedforward k (N × nu), predicted first/second-order change"""

    K: np.ndarray
    k: np.ndarray
    expected_linear: float
    expected_quadratic: float
    regularization: float


def trajectory_cost(problem: SlqProblem, trajectory: Trajectory) -> float:
    """Σ dt·½(ΔxᵀQΔx + ΔuᵀRΔu) + ½ Δx_Nᵀ Q_f Δx_N"""
    dx = trajectory.states[:-1] - problem.x_nominal
    du = trajectory.inputs - problem.u_nominal
    stage = 0.5 * problem.dt * (
        np.einsum("ti,ij,tj->", dx, problem.Q, dx) + np.einsum("ti,ij,tj->", du, problem.R, du)
    )
    dx_final = trajectory.states[-1] - problem.x_final
    return float(stage + 0.5 * dx_final @ problem.Q_final @ dx_final)


def quadratize_cost(problem: SlqProblem, trajectory: Trajectory) -> CostApproximation:
    """Exact derivatives of the quadratic cost along a trajectory"""
    N, nx, nu = trajectory.n_steps, problem.nx, problem.nu
    dt = problem.dt
    dx = trajectory.states[:-1] - problem.x_nominal
    du = trajectory.inputs - problem.u_nominal
    return CostApproximation(
        l_x=dt * dx @ problem.Q.T,
        l_u=dt * du @ problem.R.T,
        l_xx=np.broadcast_to(dt * problem.Q, (N, nx, nx)),
        l_uu=np.broadcast_to(dt * problem.R, (N, nu, nu)),
        l_ux=np.zeros((N, nu, nx)),
        terminal_x=problem.Q_final @ (trajectory.states[-1] - problem.x_final),
        terminal_xx=problem.Q_final,
    )


def riccati_backward_pass(
    dynamics: LinearizedTrajectory,
    cost: CostApproximation,
    regularization: float = 0.0,
) -> BackwardPassResult:
    """
    One backward sweep with μI added to Q_uu

    Args:
        dynamics: Discrete (A_t, B_t)
        cost: Quadratic cost model
        regularization: μ ≥ 0

    Returns:
        BackwardPassResult

    Raises:
        RiccatiFailure: Q_uu + μI is not positive definite at some step
    """
    A, B = dynamics.A, dynamics.B
    N = A.shape[0]
    nu, nx = B.shape[2], A.shape[1]
    K = np.zeros((N, nu, nx))
    k = np.zeros((N, nu))
    V_x = np.array(cost.terminal_x, dtype=float)
    V_xx = np.array(cost.terminal_xx, dtype=float)
    expected_linear = 0.0
    expected_quadratic = 0.0

    for t in reversed(range(N)):
        At, Bt = A[t], B[t]
        Q_x = cost.l_x[t] + At.T @ V_x
        Q_u = cost.l_u[t] + Bt.T @ V_x
        Q_xx = cost.l_xx[t] + At.T @ V_xx @ At
        Q_uu = cost.l_uu[t] + Bt.T @ V_xx @ Bt + regularization * np.eye(nu)
        Q_ux = cost.l_ux[t] + Bt.T @ V_xx @ At

        try:
            factor = scipy.linalg.cho_factor(0.5 * (Q_uu + Q_uu.T))
        except np.linalg.LinAlgError as exc:
            raise RiccatiFailure(f"Q_uu not positive definite at step {t} (mu={regularization:g})") from exc

        k[t] = -scipy.linalg.cho_solve(factor, Q_u)
        K[t] = -scipy.linalg.cho_solve(factor, Q_ux)

        V_x = Q_x + K[t].T @ Q_uu @ k[t] + K[t].T @ Q_u + Q_ux.T @ k[t]
        V_xx = Q_xx + K[t].T @ Q_uu @ K[t] + K[t].T @ Q_ux + Q_ux.T @ K[t]
        V_xx = 0.5 * (V_xx + V_xx.T)
        expected_linear += float(k[t] @ Q_u)
        expected_quadratic += float(0.5 * k[t] @ Q_uu @ k[t])

    return BackwardPassResult(K, k, expected_linear, expected_quadratic, regularization)


__all__ = [
    "CostApproximation",
    "BackwardPassResult",
    "trajectory_cost",
    "quadratize_cost",
    "riccati_backward_pass",
]
