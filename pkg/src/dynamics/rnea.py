"""
Recursive Newton-Euler inverse dynamics and the bias terms built from it
"""
from typing import List, Optional, Sequence, Tuple

from src.dynamics.joints import joint_velocity, motion_subspace, subspace_dot
from src.dynamics.state import check_dimensions
from src.dynamics.tree import as_scalars, joint_slice, parent_transforms
from src.model.robot_model import RobotModel
from src.spatial.algebra import (
    ForceVector,
    MotionVector,
    cross_force,
    cross_motion,
    force_add,
    force_sub,
    inertia_apply,
    inverse_transform_force,
    motion_add,
    transform_motion,
)
from src.spatial.linalg3 import ZERO3, Vec3, neg3


def base_acceleration(gravity: Vec3) -> MotionVector:
    """Fictitious world acceleration that injects gravity into the recursion"""
    return MotionVector(ZERO3, neg3(tuple(gravity)))


def rnea(
    model: RobotModel,
    q: Sequence,
    qd: Sequence,
    qdd: Sequence,
    ext_forces: Optional[Sequence[Optional[ForceVector]]] = None,
    gravity: Optional[Vec3] = None,
) -> List:
    """
    Generalized forces τ = M qdd + C + G − J_cᵀλ

    Args:
        model: Robot model
        q, qd, qdd: Generalized position, velocity and acceleration
        ext_forces: Optional per-link spatial forces in link coordinates (None entries allowed)
        gravity: Overrides the model gravity (e.g. zeros for velocity terms only)

    Returns:
        τ as a list of nv scalars, floating-base rows included
    """
    check_dimensions(model, q=q, qd=qd, qdd=qdd, ext_forces=ext_forces)
    q, qd, qdd = as_scalars(q), as_scalars(qd), as_scalars(qdd)
    a0 = base_acceleration(model.gravity if gravity is None else gravity)

    X_up = parent_transforms(model, q)
    n = model.n_links
    v: List[MotionVector] = [None] * n
    a: List[MotionVector] = [None] * n
    f: List[ForceVector] = [None] * n

    for i, link in enumerate(model.links):
        joint = link.joint
        vj = joint_velocity(joint, joint_slice(model, i, qd))
        aj = joint_velocity(joint, joint_slice(model, i, qdd))
        p = link.parent_index
        if p is None:
            v[i] = vj
            a[i] = motion_add(transform_motion(X_up[i], a0), aj)
        else:
            v[i] = motion_add(transform_motion(X_up[i], v[p]), vj)
            a[i] = motion_add(motion_add(transform_motion(X_up[i], a[p]), aj), cross_motion(v[i], vj))

        inertia = link.inertia
        f[i] = force_add(inertia_apply(inertia, a[i]), cross_force(v[i], inertia_apply(inertia, v[i])))
        if ext_forces is not None and ext_forces[i] is not None:
            f[i] = force_sub(f[i], ext_forces[i])

    tau: List = [0.0] * model.nv
    for i in range(n - 1, -1, -1):
        link = model.links[i]
        offset = model.dof_offsets[i]
        for k, column in enumerate(motion_subspace(link.joint)):
            tau[offset + k] = subspace_dot(column, f[i])
        p = link.parent_index
        if p is not None:
            f[p] = force_add(f[p], inverse_transform_force(X_up[i], f[i]))

    return tau


def get_nonlinear_terms(model: RobotModel, q: Sequence, qd: Sequence) -> Tuple[List, List]:
    """
    Coriolis/centrifugal and gravity terms

    Returns:
        (C, G) with C = rnea(q, qd, 0) without gravity and G = rnea(q, 0, 0) with gravity
    """
    zeros = [0.0] * model.nv
    C = rnea(model, q, qd, zeros, gravity=ZERO3)
    G = rnea(model, q, zeros, zeros)
    return C, G


__all__ = ["rnea", "get_nonlinear_terms", "base_acceleration"]
