"""
Per-link transforms shared by the recursive algorithms
"""
from typing import List, Sequence

import numpy as np

from src.dynamics.joints import joint_transform
from src.model.robot_model import RobotModel
from src.spatial.algebra import SpatialTransform, compose


def as_scalars(values) -> list:
    """Plain list of scalars; numpy inputs become Python floats (or their object entries)"""
    if isinstance(values, np.ndarray):
        return values.ravel().tolist()
    return list(values)


def joint_slice(model: RobotModel, index: int, values: Sequence) -> Sequence:
    offset = model.dof_offsets[index]
    return values[offset:offset + model.links[index].joint.dof]


def parent_transforms(model: RobotModel, q: Sequence) -> List[SpatialTransform]:
    """X_up[i]: coordinates of the parent (or world) frame into link i's frame"""
    transforms = []
    for i, link in enumerate(model.links):
        X_joint = joint_transform(link.joint, joint_slice(model, i, q))
        transforms.append(compose(X_joint, link.joint.parent_to_joint))
    return transforms


__all__ = ["as_scalars", "joint_slice", "parent_transforms"]
