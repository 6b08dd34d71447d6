"""
Rotation matrices and Euler-angle kinematics
"""
from typing import Sequence

from src.autodiff import scalar
from src.spatial.linalg3 import Mat3, Vec3, mat_mul, transpose3


def rotation_x(angle) -> Mat3:
    c, s = scalar.cos(angle), scalar.sin(angle)
    return ((1.0, 0.0, 0.0), (0.0, c, -s), (0.0, s, c))


def rotation_y(angle) -> Mat3:
    c, s = scalar.cos(angle), scalar.sin(angle)
    return ((c, 0.0, s), (0.0, 1.0, 0.0), (-s, 0.0, c))


def rotation_z(angle) -> Mat3:
    c, s = scalar.cos(angle), scalar.sin(angle)
    return ((c, -s, 0.0), (s, c, 0.0), (0.0, 0.0, 1.0))


def rpy_matrix(rpy: Sequence) -> Mat3:
    """Fixed-axis roll/pitch/yaw: R = Rz(yaw) Ry(pitch) Rx(roll)"""
    roll, pitch, yaw = rpy
    return mat_mul(rotation_z(yaw), mat_mul(rotation_y(pitch), rotation_x(roll)))


def euler_xyz_matrix(angles: Sequence) -> Mat3:
    """
    Intrinsic X-Y-Z Euler angles, R = Rx(a) Ry(b) Rz(c), written out in closed form

    Args:
        angles: (a, b, c) in radians

    Returns:
        Rotation taking body coordinates to world coordinates
    """
    a, b, c = angles
    ca, sa = scalar.cos(a), scalar.sin(a)
    cb, sb = scalar.cos(b), scalar.sin(b)
    cc, sc = scalar.cos(c), scalar.sin(c)
    sa_sb = sa * sb
    ca_sb = ca * sb
    return (
        (cb * cc, -(cb * sc), sb),
        (ca * sc + sa_sb * cc, ca * cc - sa_sb * sc, -(sa * cb)),
        (sa * sc - ca_sb * cc, sa * cc + ca_sb * sc, ca * cb),
    )


def euler_rates_from_body_velocity(angles: Sequence, omega: Vec3) -> Vec3:
    """
    Euler-angle rates for a body-frame angular velocity (singular at cos b = 0)

    Args:
        angles: Current (a, b, c)
        omega: Angular velocity in body coordinates

    Returns:
        (ȧ, ḃ, ċ)
    """
    _, b, c = angles
    cb, sb = scalar.cos(b), scalar.sin(b)
    cc, sc = scalar.cos(c), scalar.sin(c)
    a_dot = (cc * omega[0] - sc * omega[1]) / cb
    b_dot = sc * omega[0] + cc * omega[1]
    c_dot = omega[2] - sb * a_dot
    return (a_dot, b_dot, c_dot)


def body_velocity_from_euler_rates(angles: Sequence, rates: Vec3) -> Vec3:
    """Inverse map of ``euler_rates_from_body_velocity``"""
    _, b, c = angles
    cb, sb = scalar.cos(b), scalar.sin(b)
    cc, sc = scalar.cos(c), scalar.sin(c)
    a_dot, b_dot, c_dot = rates
    return (
        cb * cc * a_dot + sc * b_dot,
        -(cb * sc * a_dot) + cc * b_dot,
        sb * a_dot + c_dot,
    )


def axis_angle_matrix(axis: Vec3, angle) -> Mat3:
    """Rodrigues rotation about a unit axis"""
    c, s = scalar.cos(angle), scalar.sin(angle)
    t = 1.0 - c
    x, y, z = axis
    return (
        (c + t * x * x, t * x * y - s * z, t * x * z + s * y),
        (t * x * y + s * z, c + t * y * y, t * y * z - s * x),
        (t * x * z - s * y, t * y * z + s * x, c + t * z * z),
    )


def axis_angle_transform_rotation(axis: Vec3, angle) -> Mat3:
    """Coordinate rotation Rᵀ of a joint frame turned by ``angle`` about ``axis``"""
    return transpose3(axis_angle_matrix(axis, angle))


__all__ = [
    "rotation_x",
    "rotation_y",
    "rotation_z",
    "rpy_matrix",
    "euler_xyz_matrix",
    "euler_rates_from_body_velocity",
    "body_velocity_from_euler_rates",
    "axis_angle_matrix",
    "axis_angle_transform_rotation",
]
