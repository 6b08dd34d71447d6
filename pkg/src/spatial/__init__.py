"""
Spatial vector algebra generic over the scalar backends
"""
from src.spatial.algebra import *  # noqa: F401,F403
from src.spatial.algebra import __all__ as _algebra_all
from src.spatial.linalg3 import IDENTITY3, ZERO3, Mat3, Vec3
from src.spatial.rotations import (
    axis_angle_matrix,
    euler_rates_from_body_velocity,
    euler_xyz_matrix,
    rpy_matrix,
)

__all__ = list(_algebra_all) + [
    "Vec3",
    "Mat3",
    "IDENTITY3",
    "ZERO3",
    "axis_angle_matrix",
    "euler_rates_from_body_velocity",
    "euler_xyz_matrix",
    "rpy_matrix",
]
