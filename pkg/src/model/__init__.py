"""
Robot models and the text model format
"""
from src.model.builders import chain_model
from src.model.parser import format_model, load_model, parse_model
from src.model.robot_model import (
    EndEffector,
    Joint,
    JointLimits,
    JointType,
    Link,
    RobotModel,
    state_dimensions,
)

__all__ = [
    "EndEffector",
    "Joint",
    "JointLimits",
    "JointType",
    "Link",
    "RobotModel",
    "state_dimensions",
    "parse_model",
    "format_model",
    "load_model",
    "chain_model",
]
