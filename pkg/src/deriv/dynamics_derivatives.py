"""
Derivatives of forward dynamics, inverse dynamics, floating-base inverse
dynamics and end-effector kinematics, plus the analytic torque block and
the test-scope oracles built on AD.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
import scipy.linalg

from src.contact.model import SystemDynamicsConfig
from src.deriv.engine import Provider, generic_jacobian, get_engine
from src.deriv.functions import FunctionKind, inertia_parameters
from src.dynamics.crba import crba
from src.dynamics.ltl import ltl_factorize, ltl_solve
from src.model.robot_model import RobotModel
from src.utils.errors import NotFloatingBase
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class LinearizedDynamics:
    """∂qdd/∂q (nv×nq), ∂qdd/∂qd (nv×nv), ∂qdd/∂τ_a (nv×nu)"""

    A_q: np.ndarray
    A_qd: np.ndarray
    B: np.ndarray


@dataclass(frozen=True)
class InverseDynamicsDerivatives:
    """∂τ/∂q, ∂τ/∂qd, ∂τ/∂qdd"""

    D_q: np.ndarray
    D_qd: np.ndarray
    D_qdd: np.ndarray


def _stack(*parts: Sequence[float]) -> np.ndarray:
    return np.concatenate([np.asarray(p, dtype=float).ravel() for p in parts])


def fd_derivatives(
    model: RobotModel,
    q: Sequence[float],
    qd: Sequence[float],
    tau: Sequence[float],
    provider: Provider = Provider.COMPILED_AD,
    contact: Optional[SystemDynamicsConfig] = None,
) -> LinearizedDynamics:
    """
    Jacobians of forward dynamics qdd = aba(q, qd, Sᵀτ_a, λ(q, qd))

    Args:
        model: Robot model
        q, qd: Generalized position and velocity
        tau: Actuated torques (nu)
        provider: Derivative provider (ANALYTIC only via ``fd_torque_block``)
        contact: Optional contact configuration

    Returns:
        LinearizedDynamics
    """
    provider = Provider(provider)
    if provider == Provider.ANALYTIC:
        raise ValueError("Analytic forward-dynamics derivatives cover only the torque block; use fd_torque_block")
    engine = get_engine(model, FunctionKind.FORWARD_DYNAMICS, contact)
    _, J = engine.jacobian(_stack(q, qd, tau), provider)
    s = engine.function.block_slices()
    return LinearizedDynamics(J[:, s["q"]], J[:, s["qd"]], J[:, s["tau"]])


def fd_torque_block(
    model: RobotModel,
    q: Sequence[float],
    qd: Sequence[float],
    tau: Sequence[float],
    provider: Provider = Provider.COMPILED_AD,
    contact: Optional[SystemDynamicsConfig] = None,
    method: str = "ltl",
) -> np.ndarray:
    """
    Actuated rows of ∂qdd/∂τ_a = M⁻¹Sᵀ (nu×nu)

    Only the τ columns are differentiated. The ANALYTIC provider assembles
    the block from CRBA, through the tree factorization (``method="ltl"``)
    or a dense inverse (``method="dense"``).
    """
    provider = Provider(provider)
    actuated = list(model.actuated_indices)
    if provider == Provider.ANALYTIC:
        M = crba(model, list(map(float, q))).as_array()
        if method == "dense":
            return scipy.linalg.inv(M)[np.ix_(actuated, actuated)]
        if method != "ltl":
            raise ValueError(f"Unknown analytic method '{method}'")
        factorization = ltl_factorize(M.tolist(), model)
        block = np.zeros((len(actuated), len(actuated)))
        for c, dof in enumerate(actuated):
            unit = [0.0] * model.nv
            unit[dof] = 1.0
            column = ltl_solve(factorization, unit)
            block[:, c] = [column[r] for r in actuated]
        return block

    engine = get_engine(model, FunctionKind.FORWARD_DYNAMICS, contact)
    _, J = engine.jacobian(_stack(q, qd, tau), provider, wrt=engine.function.columns("tau"))
    return J[actuated, :]


def id_derivatives(
    model: RobotModel,
    q: Sequence[float],
    qd: Sequence[float],
    qdd: Sequence[float],
    provider: Provider = Provider.COMPILED_AD,
    contact: Optional[SystemDynamicsConfig] = None,
) -> InverseDynamicsDerivatives:
    """
    Jacobians of inverse dynamics τ = rnea(q, qd, qdd, λ(q, qd))

    Returns:
        InverseDynamicsDerivatives; D_qdd equals the joint-space inertia
    """
    engine = get_engine(model, FunctionKind.INVERSE_DYNAMICS, contact)
    _, J = engine.jacobian(_stack(q, qd, qdd), provider)
    s = engine.function.block_slices()
    return InverseDynamicsDerivatives(J[:, s["q"]], J[:, s["qd"]], J[:, s["qdd"]])


def floating_base_id_derivatives(
    model: RobotModel,
    q: Sequence[float],
    qd: Sequence[float],
    qdd_actuated: Sequence[float],
    provider: Provider = Provider.COMPILED_AD,
    contact: Optional[SystemDynamicsConfig] = None,
) -> InverseDynamicsDerivatives:
    """
    Jacobians of the actuated-torque map τ_a(q, qd, qdd_a)

    The composite expression is differentiated as a whole; D_qdd is
    (S M⁻¹ Sᵀ)⁻¹ (nu×nu).
    """
    if not model.has_floating_base:
        raise NotFloatingBase(f"Model '{model.name}' has no floating base")
    engine = get_engine(model, FunctionKind.FLOATING_BASE_ID, contact)
    _, J = engine.jacobian(_stack(q, qd, qdd_actuated), provider)
    s = engine.function.block_slices()
    return InverseDynamicsDerivatives(J[:, s["q"]], J[:, s["qd"]], J[:, s["qdd_a"]])


def kinematics_derivatives(
    model: RobotModel,
    q: Sequence[float],
    qd: Sequence[float],
    provider: Provider = Provider.COMPILED_AD,
) -> np.ndarray:
    """
    Jacobian of the stacked end-effector map [p_1..p_k, ṗ_1..ṗ_k] wrt [q, qd]

    Returns:
        6k × (nq + nv) matrix
    """
    engine = get_engine(model, FunctionKind.KINEMATICS)
    _, J = engine.jacobian(_stack(q, qd), provider)
    return J


def dMdq_oracle(model: RobotModel, q: Sequence[float], provider: Provider = Provider.FORWARD_AD) -> np.ndarray:
    """
    ∂M/∂q by differentiating CRBA

    Returns:
        Array of shape (nv, nv, nq); [:, :, k] is ∂M/∂q_k
    """
    nv = model.nv

    def flattened_inertia(x):
        matrix = crba(model, x).matrix
        return [entry for row in matrix for entry in row]

    _, J = generic_jacobian(flattened_inertia, q, provider, name="crba")
    return J.reshape(nv, nv, model.nq)


def id_parameter_derivatives(
    model: RobotModel,
    q: Sequence[float],
    qd: Sequence[float],
    qdd: Sequence[float],
    link: Union[int, str],
    provider: Provider = Provider.COMPILED_AD,
) -> np.ndarray:
    """
    ∂τ/∂θ for the ten inertial parameters θ = (m, c, ixx, iyy, izz, ixy, ixz, iyz) of one link

    The parameters are runtime inputs of the recorded function, so compiled
    programs serve any inertia values without recompiling.

    Returns:
        nv×10 matrix
    """
    index = model.link_index(link) if isinstance(link, str) else int(link)
    engine = get_engine(model, FunctionKind.INVERSE_DYNAMICS, parameter_link=index)
    theta = inertia_parameters(model.links[index].inertia)
    _, J = engine.jacobian(_stack(q, qd, qdd, theta), provider, wrt=engine.function.columns("theta"))
    return J


__all__ = [
    "LinearizedDynamics",
    "InverseDynamicsDerivatives",
    "fd_derivatives",
    "fd_torque_block",
    "id_derivatives",
    "floating_base_id_derivatives",
    "kinematics_derivatives",
    "dMdq_oracle",
    "id_parameter_derivatives",
]
