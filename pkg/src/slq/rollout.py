"""
RK4 rollouts under an affine controller and the discrete-time
linearization of the RK4 step.

Inputs are held constant over a step. The step sensitivities are assembled
from the continuous Jacobians at the four stage points:

    dk1 = J1                 dk2 = J2 (I + dt/2 dk1)
    dk3 = J3 (I + dt/2 dk2)  dk4 = J4 (I + dt dk3)
    d x+ = I + dt/6 (dk1 + 2 dk2 + 2 dk3 + dk4)

where each J is ∂f/∂[x, u] and the (I + ...) factors act on the x part.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from config.settings import settings
from src.deriv.engine import JacobianEngine, Provider, get_engine
from src.deriv.functions import FunctionKind
from src.slq.problem import AffineController, SlqProblem
from src.utils.errors import DivergedRollout

ControllerFn = Callable[[int, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States (N+1 × nx) and inputs (N × nu)"""

    states: np.ndarray
    inputs: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.inputs.shape[0]


@dataclass(frozen=True, eq=False)
class LinearizedTrajectory:
    """Discrete-time A_t (N × nx × nx) and B_t (N × nx × nu)"""

    A: np.ndarray
    B: np.ndarray


def dynamics_engine(problem: SlqProblem) -> JacobianEngine:
    return get_engine(problem.model, FunctionKind.SYSTEM_DYNAMICS, problem.system)


def rk4_step(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, u: np.ndarray, dt: float) -> np.ndarray:
    """One RK4 step of ẋ = f([x, u]) with u held constant"""
    k1 = f(np.concatenate([x, u]))
    k2 = f(np.concatenate([x + 0.5 * dt * k1, u]))
    k3 = f(np.concatenate([x + 0.5 * dt * k2, u]))
    k4 = f(np.concatenate([x + dt * k3, u]))
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_state(x: np.ndarray, t: int):
    bound = settings.ROLLOUT_STATE_BOUND
    if not np.all(np.isfinite(x)) or np.linalg.norm(x) > bound:
        raise DivergedRollout(f"State norm left the admissible region (> {bound:g}) at step {t}")


def rollout(problem: SlqProblem, controller: ControllerFn, x0: Optional[np.ndarray] = None) -> Trajectory:
    """
    Forward-integrate the closed loop

    Args:
        problem: SLQ problem
        controller: u_t = controller(t, x_t), e.g. an AffineController
        x0: Initial state; the problem's by default

    Returns:
        Trajectory
    """
    engine = dynamics_engine(problem)
    x = np.array(problem.x0 if x0 is None else x0, dtype=float)
    states = np.zeros((problem.n_steps + 1, problem.nx))
    inputs = np.zeros((problem.n_steps, problem.nu))
    states[0] = x
    for t in range(problem.n_steps):
        u = np.asarray(controller(t, x), dtype=float)
        x = rk4_step(engine.value, x, u, problem.dt)
        _check_state(x, t + 1)
        inputs[t] = u
        states[t + 1] = x
    return Trajectory(states, inputs)


def linearize_step(
    engine: JacobianEngine,
    x: np.ndarray,
    u: np.ndarray,
    dt: float,
    provider: Provider = Provider.COMPILED_AD,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    (A, B) of the RK4 step map x+ = Φ(x, u)

    Args:
        engine: System-dynamics engine
        x, u: Linearization point
        dt: Step
        provider: Derivative provider for the continuous Jacobians

    Returns:
        (∂Φ/∂x, ∂Φ/∂u)
    """
    nx = x.size
    eye = np.hstack([np.eye(nx), np.zeros((nx, u.size))])

    k1, J1 = engine.jacobian(np.concatenate([x, u]), provider)
    dk1 = J1
    k2, J2 = engine.jacobian(np.concatenate([x + 0.5 * dt * k1, u]), provider)
    dk2 = J2[:, :nx] @ (eye + 0.5 * dt * dk1)
    dk2[:, nx:] += J2[:, nx:]
    k3, J3 = engine.jacobian(np.concatenate([x + 0.5 * dt * k2, u]), provider)
    dk3 = J3[:, :nx] @ (eye + 0.5 * dt * dk2)
    dk3[:, nx:] += J3[:, nx:]
    _, J4 = engine.jacobian(np.concatenate([x + dt * k3, u]), provider)
    dk4 = J4[:, :nx] @ (eye + dt * dk3)
    dk4[:, nx:] += J4[:, nx:]

    step = eye + dt / 6.0 * (dk1 + 2.0 * dk2 + 2.0 * dk3 + dk4)
    return step[:, :nx], step[:, nx:]


def linearize_along_trajectory(
    problem: SlqProblem,
    trajectory: Trajectory,
    provider: Provider = Provider.COMPILED_AD,
    threads: int = 1,
) -> LinearizedTrajectory:
    """
    Discrete (A_t, B_t) at every step of a rollout

    Steps are independent; with ``threads > 1`` they are evaluated on a
    thread pool.
    """
    # build before fanning out
    engine = dynamics_engine(problem).prepare(provider)

    def at(t: int) -> Tuple[np.ndarray, np.ndarray]:
        return linearize_step(engine, trajectory.states[t], trajectory.inputs[t], problem.dt, provider)

    steps = range(trajectory.n_steps)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results: List = list(pool.map(at, steps))
    else:
        results = [at(t) for t in steps]
    A = np.stack([r[0] for r in results]) if results else np.zeros((0, problem.nx, problem.nx))
    B = np.stack([r[1] for r in results]) if results else np.zeros((0, problem.nx, problem.nu))
    return LinearizedTrajectory(A, B)


__all__ = [
    "Trajectory",
    "LinearizedTrajectory",
    "dynamics_engine",
    "rk4_step",
    "rollout",
    "linearize_step",
    "linearize_along_trajectory",
]
