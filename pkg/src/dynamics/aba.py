"""
Articulated Body Algorithm for forward dynamics
"""
from typing import List, Optional, Sequence

from src.dynamics.joints import joint_velocity, motion_along, motion_subspace, subspace_dot
from src.dynamics.linalg import solve_spd
from src.dynamics.rnea import base_acceleration
from src.dynamics.state import check_dimensions
from src.dynamics.tree import as_scalars, joint_slice, parent_transforms
from src.model.robot_model import JointType, RobotModel
from src.spatial.algebra import (
    ZERO_MOTION,
    ForceVector,
    MotionVector,
    SpatialMatrix,
    cross_force,
    cross_motion,
    force_add,
    force_outer,
    force_scale,
    force_sub,
    inertia_apply,
    inertia_to_matrix,
    inverse_transform_force,
    matrix_add,
    matrix_apply,
    matrix_sub,
    matrix_to_parent,
    motion_add,
    spatial_dot,
    transform_motion,
)


def _as_dense(M: SpatialMatrix) -> List[List]:
    A, B, C = M
    rows = []
    for r in range(3):
        rows.append(list(A[r]) + list(B[r]))
    for r in range(3):
        rows.append([B[0][r], B[1][r], B[2][r]] + list(C[r]))
    return rows


def aba(
    model: RobotModel,
    q: Sequence,
    qd: Sequence,
    tau: Sequence,
    ext_forces: Optional[Sequence[Optional[ForceVector]]] = None,
) -> List:
    """
    Generalized accelerations for applied generalized forces

    Args:
        model: Robot model
        q, qd: Generalized position and velocity
        tau: Generalized forces (nv); floating-base rows are normally zero, see ``selection_transpose``
        ext_forces: Optional per-link spatial forces in link coordinates

    Returns:
        qdd as a list of nv scalars
    """
    check_dimensions(model, q=q, qd=qd, tau=tau, ext_forces=ext_forces)
    q, qd, tau = as_scalars(q), as_scalars(qd), as_scalars(tau)
    a0 = base_acceleration(model.gravity)

    X_up = parent_transforms(model, q)
    n = model.n_links
    v: List[MotionVector] = [None] * n
    c: List[MotionVector] = [None] * n
    IA: List[SpatialMatrix] = [None] * n
    pA: List[ForceVector] = [None] * n

    for i, link in enumerate(model.links):
        vj = joint_velocity(link.joint, joint_slice(model, i, qd))
        p = link.parent_index
        if p is None:
            v[i] = vj
            c[i] = ZERO_MOTION
        else:
            v[i] = motion_add(transform_motion(X_up[i], v[p]), vj)
            c[i] = cross_motion(v[i], vj)
        IA[i] = inertia_to_matrix(link.inertia)
        pA[i] = cross_force(v[i], inertia_apply(link.inertia, v[i]))
        if ext_forces is not None and ext_forces[i] is not None:
            pA[i] = force_sub(pA[i], ext_forces[i])

    U: List[ForceVector] = [None] * n
    D: List = [None] * n
    u: List = [None] * n
    for i in range(n - 1, -1, -1):
        link = model.links[i]
        if link.joint.kind == JointType.FLOATING:
            # Root only; solved directly in the forward sweep
            continue
        column = motion_subspace(link.joint)[0]
        offset = model.dof_offsets[i]
        U[i] = matrix_apply(IA[i], column)
        D[i] = subspace_dot(column, U[i])
        u[i] = tau[offset] - subspace_dot(column, pA[i])
        p = link.parent_index
        if p is not None:
            inv_d = 1.0 / D[i]
            Ia = matrix_sub(IA[i], force_outer(U[i], inv_d))
            pa = force_add(force_add(pA[i], matrix_apply(Ia, c[i])), force_scale(U[i], u[i] * inv_d))
            IA[p] = matrix_add(IA[p], matrix_to_parent(X_up[i], Ia))
            pA[p] = force_add(pA[p], inverse_transform_force(X_up[i], pa))

    qdd: List = [0.0] * model.nv
    a: List[MotionVector] = [None] * n
    for i, link in enumerate(model.links):
        p = link.parent_index
        parent_acc = a0 if p is None else a[p]
        a_prime = motion_add(transform_motion(X_up[i], parent_acc), c[i])
        offset = model.dof_offsets[i]
        if link.joint.kind == JointType.FLOATING:
            # IA a = τ_base − pA with S = I
            rhs = [tau[offset + k] for k in range(6)]
            bias = pA[i].torque + pA[i].force
            rhs = [rhs[k] - bias[k] for k in range(6)]
            acc = solve_spd(_as_dense(IA[i]), rhs)
            a[i] = MotionVector((acc[0], acc[1], acc[2]), (acc[3], acc[4], acc[5]))
            prime = a_prime.angular + a_prime.linear
            for k in range(6):
                qdd[offset + k] = acc[k] - prime[k]
        else:
            column = motion_subspace(link.joint)[0]
            qdd_i = (u[i] - spatial_dot(a_prime, U[i])) / D[i]
            qdd[offset] = qdd_i
            a[i] = motion_add(a_prime, motion_along(column, qdd_i))

    return qdd


__all__ = ["aba"]
