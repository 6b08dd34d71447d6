"""
Composite Rigid Body Algorithm for the joint-space inertia matrix
"""
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from src.autodiff.scalar import primal_value
from src.dynamics.joints import motion_subspace, subspace_dot
from src.dynamics.state import check_dimensions
from src.dynamics.tree import as_scalars, parent_transforms
from src.model.robot_model import RobotModel
from src.spatial.algebra import (
    inertia_to_matrix,
    inverse_transform_force,
    matrix_add,
    matrix_apply,
    matrix_to_parent,
)


@dataclass(frozen=True)
class JointSpaceInertia:
    """M(q) as nested lists of scalars"""

    matrix: List[List]

    @property
    def size(self) -> int:
        return len(self.matrix)

    def as_array(self) -> np.ndarray:
        """Float copy (primal values for AD entries)"""
        return np.array([[primal_value(x) for x in row] for row in self.matrix], dtype=float)


def crba(model: RobotModel, q: Sequence) -> JointSpaceInertia:
    """
    Joint-space inertia matrix M(q)

    Args:
        model: Robot model
        q: Generalized position

    Returns:
        Symmetric positive-definite nv×nv matrix
    """
    check_dimensions(model, q=q)
    q = as_scalars(q)
    X_up = parent_transforms(model, q)
    composite = [inertia_to_matrix(link.inertia) for link in model.links]
    for i in range(model.n_links - 1, -1, -1):
        p = model.links[i].parent_index
        if p is not None:
            composite[p] = matrix_add(composite[p], matrix_to_parent(X_up[i], composite[i]))

    nv = model.nv
    M: List[List] = [[0.0] * nv for _ in range(nv)]
    for i, link in enumerate(model.links):
        offset = model.dof_offsets[i]
        columns = motion_subspace(link.joint)
        for k, column in enumerate(columns):
            row = offset + k
            F = matrix_apply(composite[i], column)
            for l in range(k + 1):
                value = subspace_dot(columns[l], F)
                M[offset + l][row] = value
                M[row][offset + l] = value

            j = i
            while model.links[j].parent_index is not None:
                F = inverse_transform_force(X_up[j], F)
                j = model.links[j].parent_index
                j_offset = model.dof_offsets[j]
                for l, parent_column in enumerate(motion_subspace(model.links[j].joint)):
                    value = subspace_dot(parent_column, F)
                    M[j_offset + l][row] = value
                    M[row][j_offset + l] = value

    return JointSpaceInertia(M)


__all__ = ["JointSpaceInertia", "crba"]
