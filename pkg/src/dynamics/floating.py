"""
Actuated-joint inverse dynamics for under-actuated (floating-base) systems

With M qdd + h = Sᵀτ and the actuated accelerations qdd_a = S qdd given,

    τ = (S M⁻¹ Sᵀ)⁻¹ (qdd_a + S M⁻¹ h),    h = rnea(q, qd, 0, ext)

which is the inertia-weighted pseudo-inverse form. For fixed-base models
S = I and this reduces to ordinary inverse dynamics.
"""
from typing import List, Optional, Sequence

from src.dynamics.crba import crba
from src.dynamics.linalg import solve_spd
from src.dynamics.ltl import ltl_factorize, ltl_solve
from src.dynamics.rnea import rnea
from src.dynamics.state import check_dimensions
from src.dynamics.tree import as_scalars
from src.model.robot_model import RobotModel
from src.spatial.algebra import ForceVector
from src.utils.validators import ArrayValidator


def floating_base_inverse_dynamics(
    model: RobotModel,
    q: Sequence,
    qd: Sequence,
    qdd_actuated: Sequence,
    ext_forces: Optional[Sequence[Optional[ForceVector]]] = None,
) -> List:
    """
    Actuator torques producing the requested joint accelerations

    Args:
        model: Robot model
        q, qd: Generalized position and velocity
        qdd_actuated: Desired accelerations of the actuated joints (nu)
        ext_forces: Optional per-link spatial forces in link coordinates

    Returns:
        τ_a as a list of nu scalars
    """
    check_dimensions(model, q=q, qd=qd, ext_forces=ext_forces)
    ArrayValidator.check_length(qdd_actuated, model.nu, "qdd_actuated")
    q, qd, qdd_actuated = as_scalars(q), as_scalars(qd), as_scalars(qdd_actuated)
    actuated = model.actuated_indices

    h = rnea(model, q, qd, [0.0] * model.nv, ext_forces)
    factorization = ltl_factorize(crba(model, q), model)
    minv_h = ltl_solve(factorization, h)

    # columns of M⁻¹Sᵀ, restricted to actuated rows
    A = [[None] * len(actuated) for _ in actuated]
    for c, dof in enumerate(actuated):
        unit = [0.0] * model.nv
        unit[dof] = 1.0
        column = ltl_solve(factorization, unit)
        for r, row_dof in enumerate(actuated):
            A[r][c] = column[row_dof]

    rhs = [qdd_actuated[r] + minv_h[dof] for r, dof in enumerate(actuated)]
    return solve_spd(A, rhs)


__all__ = ["floating_base_inverse_dynamics"]
