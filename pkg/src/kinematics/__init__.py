"""Forward kinematics and end-effector maps"""
from src.kinematics.forward import (
    configuration_rate,
    end_effector_jacobian,
    end_effector_position,
    end_effector_transform,
    end_effector_velocity,
    feet_kinematics,
    forward_kinematics,
    link_velocities,
)

__all__ = [
    "configuration_rate",
    "end_effector_jacobian",
    "end_effector_position",
    "end_effector_transform",
    "end_effector_velocity",
    "feet_kinematics",
    "forward_kinematics",
    "link_velocities",
]
