"""
Forward kinematics, end-effector positions, velocities and geometric Jacobians.

World poses are returned as coordinate transforms X_0i (world → link i):
the translation is the link origin in world coordinates and the rotation
maps world coordinates into link coordinates.
"""
from typing import List, Optional, Sequence, Union

import numpy as np

from src.autodiff.scalar import REAL_TYPES
from src.dynamics.joints import joint_velocity, motion_subspace
from src.dynamics.state import check_dimensions
from src.dynamics.tree import as_scalars, joint_slice, parent_transforms
from src.model.robot_model import EndEffector, RobotModel
from src.spatial.algebra import MotionVector, SpatialTransform, compose, motion_add, transform_motion
from src.spatial.linalg3 import Vec3, add3, cross3, mat_t_vec, mat_vec, sub3
from src.spatial.rotations import euler_rates_from_body_velocity, euler_xyz_matrix

EndEffectorKey = Union[str, int]


def _to_matrix(rows: List[List]) -> np.ndarray:
    if all(isinstance(x, REAL_TYPES) for row in rows for x in row):
        return np.array(rows, dtype=float)
    out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            out[i, j] = x
    return out


def world_poses(model: RobotModel, X_up: List[SpatialTransform]) -> List[SpatialTransform]:
    """World poses X_0i from the parent transforms"""
    poses: List[SpatialTransform] = []
    for i, link in enumerate(model.links):
        p = link.parent_index
        poses.append(X_up[i] if p is None else compose(X_up[i], poses[p]))
    return poses


def forward_kinematics(model: RobotModel, q: Sequence) -> List[SpatialTransform]:
    """
    World pose of every link frame

    Args:
        model: Robot model
        q: Generalized position

    Returns:
        X_0i for each link, in link order
    """
    check_dimensions(model, q=q)
    q = as_scalars(q)
    return world_poses(model, parent_transforms(model, q))


def link_velocities(model: RobotModel, q: Sequence, qd: Sequence, X_up=None) -> List[MotionVector]:
    """Spatial velocity of every link in its own coordinates"""
    q, qd = as_scalars(q), as_scalars(qd)
    if X_up is None:
        X_up = parent_transforms(model, q)
    velocities: List[MotionVector] = []
    for i, link in enumerate(model.links):
        vj = joint_velocity(link.joint, joint_slice(model, i, qd))
        p = link.parent_index
        velocities.append(vj if p is None else motion_add(transform_motion(X_up[i], velocities[p]), vj))
    return velocities


def _resolve(model: RobotModel, ee: Union[EndEffectorKey, EndEffector]) -> EndEffector:
    return ee if isinstance(ee, EndEffector) else model.end_effector(ee)


def end_effector_transform(model: RobotModel, q: Sequence, ee: EndEffectorKey) -> SpatialTransform:
    """World → end-effector frame transform T_ee"""
    effector = _resolve(model, ee)
    poses = forward_kinematics(model, q)
    return compose(effector.offset, poses[effector.link_index])


def end_effector_position(model: RobotModel, q: Sequence, ee: EndEffectorKey) -> Vec3:
    """Origin of the end-effector frame in world coordinates"""
    return end_effector_transform(model, q, ee).translation


def point_velocity(X_link: SpatialTransform, v_link: MotionVector, offset: Vec3) -> Vec3:
    """World-frame linear velocity of a point fixed at ``offset`` in link coordinates"""
    linear = add3(v_link.linear, cross3(v_link.angular, offset))
    return mat_t_vec(X_link.rotation, linear)


def end_effector_velocity(model: RobotModel, q: Sequence, qd: Sequence, ee: EndEffectorKey) -> Vec3:
    """
    World-frame linear velocity ṗ of the end-effector origin

    Args:
        model: Robot model
        q, qd: Generalized position and velocity
        ee: End-effector name or index

    Returns:
        ṗ = J_ee qd (linear part)
    """
    effector = _resolve(model, ee)
    check_dimensions(model, q=q, qd=qd)
    q, qd = as_scalars(q), as_scalars(qd)
    X_up = parent_transforms(model, q)
    poses = world_poses(model, X_up)
    velocities = link_velocities(model, q, qd, X_up)
    link = effector.link_index
    return point_velocity(poses[link], velocities[link], effector.xyz)


def end_effector_jacobian(model: RobotModel, q: Sequence, ee: EndEffectorKey) -> np.ndarray:
    """
    Geometric Jacobian of the end-effector frame

    Rows 0-2 map qd to the world-frame angular velocity, rows 3-5 to the
    world-frame linear velocity of the end-effector origin. Columns of joints
    off the path to the root are zero.

    Args:
        model: Robot model
        q: Generalized position
        ee: End-effector name or index

    Returns:
        6×nv matrix (float, or object dtype for AD scalars)
    """
    effector = _resolve(model, ee)
    poses = forward_kinematics(model, q)
    tip = compose(effector.offset, poses[effector.link_index]).translation

    rows: List[List] = [[0.0] * model.nv for _ in range(6)]
    for j in model.ancestors(effector.link_index):
        pose = poses[j]
        offset = model.dof_offsets[j]
        lever = sub3(tip, pose.translation)
        for k, column in enumerate(motion_subspace(model.links[j].joint)):
            angular = mat_t_vec(pose.rotation, column.angular)
            linear = add3(mat_t_vec(pose.rotation, column.linear), cross3(angular, lever))
            for r in range(3):
                rows[r][offset + k] = angular[r]
                rows[3 + r][offset + k] = linear[r]
    return _to_matrix(rows)


def feet_kinematics(
    model: RobotModel,
    q: Sequence,
    qd: Sequence,
    end_effectors: Optional[Sequence[EndEffectorKey]] = None,
) -> List:
    """
    Stacked positions and velocities of several end-effectors

    Args:
        model: Robot model
        q, qd: Generalized position and velocity
        end_effectors: Names or indices; all registered end-effectors by default

    Returns:
        [p_1, ..., p_k, ṗ_1, ..., ṗ_k] flattened (6k scalars)
    """
    check_dimensions(model, q=q, qd=qd)
    q, qd = as_scalars(q), as_scalars(qd)
    effectors = (
        list(model.end_effectors) if end_effectors is None else [_resolve(model, ee) for ee in end_effectors]
    )
    X_up = parent_transforms(model, q)
    poses = world_poses(model, X_up)
    velocities = link_velocities(model, q, qd, X_up)

    positions: List = []
    rates: List = []
    for effector in effectors:
        link = effector.link_index
        positions.extend(compose(effector.offset, poses[link]).translation)
        rates.extend(point_velocity(poses[link], velocities[link], effector.xyz))
    return positions + rates


def configuration_rate(model: RobotModel, q: Sequence, qd: Sequence) -> List:
    """
    Time derivative of q for a generalized velocity qd

    Floating-base body angular velocity becomes Euler-angle rates and body
    linear velocity becomes world position rates; joint rates pass through.
    """
    check_dimensions(model, q=q, qd=qd)
    q, qd = as_scalars(q), as_scalars(qd)
    if not model.has_floating_base:
        return list(qd)
    angles = (q[0], q[1], q[2])
    omega = (qd[0], qd[1], qd[2])
    rotation = euler_xyz_matrix(angles)
    linear = mat_vec(rotation, (qd[3], qd[4], qd[5]))
    return list(euler_rates_from_body_velocity(angles, omega)) + list(linear) + list(qd[6:])


__all__ = [
    "forward_kinematics",
    "world_poses",
    "link_velocities",
    "point_velocity",
    "end_effector_transform",
    "end_effector_position",
    "end_effector_velocity",
    "end_effector_jacobian",
    "feet_kinematics",
    "configuration_rate",
]
