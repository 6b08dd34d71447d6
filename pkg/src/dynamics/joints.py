"""
Joint models: coordinate transforms, motion subspaces and joint velocities
"""
from functools import lru_cache
from typing import Sequence, Tuple

from src.model.robot_model import Joint, JointType
from src.spatial.algebra import ForceVector, MotionVector, SpatialTransform
from src.spatial.linalg3 import IDENTITY3, ZERO3, Vec3, transpose3
from src.spatial.rotations import (
    axis_angle_transform_rotation,
    euler_xyz_matrix,
    rotation_x,
    rotation_y,
    rotation_z,
)

_COORDINATE_ROTATIONS = {
    (1.0, 0.0, 0.0): rotation_x,
    (0.0, 1.0, 0.0): rotation_y,
    (0.0, 0.0, 1.0): rotation_z,
}


def scaled_axis(axis: Vec3, s) -> Vec3:
    """axis · s, leaving structurally zero components as float zeros"""
    return tuple(0.0 if a == 0.0 else (s if a == 1.0 else a * s) for a in axis)


def joint_transform(joint: Joint, q: Sequence) -> SpatialTransform:
    """
    Transform from the joint's predecessor frame to its successor frame

    Args:
        joint: Joint description
        q: The joint's coordinates (1 or 6 values)

    Returns:
        X_J
    """
    if joint.kind == JointType.REVOLUTE:
        rotation = _COORDINATE_ROTATIONS.get(tuple(float(a) for a in joint.axis))
        if rotation is not None:
            return SpatialTransform(transpose3(rotation(q[0])), ZERO3)
        return SpatialTransform(axis_angle_transform_rotation(joint.axis, q[0]), ZERO3)
    if joint.kind == JointType.PRISMATIC:
        return SpatialTransform(IDENTITY3, scaled_axis(joint.axis, q[0]))
    # Floating base: body orientation from Euler angles, origin at the position
    return SpatialTransform(transpose3(euler_xyz_matrix(q[0:3])), (q[3], q[4], q[5]))


@lru_cache(maxsize=None)
def motion_subspace(joint: Joint) -> Tuple[MotionVector, ...]:
    """Constant columns of S for a joint, in successor-frame coordinates"""
    if joint.kind == JointType.REVOLUTE:
        return (MotionVector(tuple(joint.axis), ZERO3),)
    if joint.kind == JointType.PRISMATIC:
        return (MotionVector(ZERO3, tuple(joint.axis)),)
    columns = []
    for k in range(6):
        unit = [0.0] * 6
        unit[k] = 1.0
        columns.append(MotionVector(tuple(unit[:3]), tuple(unit[3:])))
    return tuple(columns)


def joint_velocity(joint: Joint, qd: Sequence) -> MotionVector:
    """S · qd for one joint"""
    if joint.kind == JointType.REVOLUTE:
        return MotionVector(scaled_axis(joint.axis, qd[0]), ZERO3)
    if joint.kind == JointType.PRISMATIC:
        return MotionVector(ZERO3, scaled_axis(joint.axis, qd[0]))
    return MotionVector((qd[0], qd[1], qd[2]), (qd[3], qd[4], qd[5]))


def motion_along(column: MotionVector, s) -> MotionVector:
    """column · s with structural zeros kept"""
    return MotionVector(scaled_axis(column.angular, s), scaled_axis(column.linear, s))


def subspace_dot(column: MotionVector, f: ForceVector):
    """columnᵀ f, skipping the structurally zero entries of a constant column"""
    total = None
    for a, x in zip(column.angular + column.linear, f.torque + f.force):
        if a == 0.0:
            continue
        term = x if a == 1.0 else a * x
        total = term if total is None else total + term
    return 0.0 if total is None else total


__all__ = ["joint_transform", "motion_subspace", "joint_velocity", "motion_along", "scaled_axis", "subspace_dot"]
