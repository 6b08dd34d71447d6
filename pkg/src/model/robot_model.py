"""
Robot description: kinematic tree, joints, inertias and end-effector frames
"""
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from src.spatial.algebra import SpatialInertia, SpatialTransform
from src.spatial.linalg3 import Vec3, transpose3
from src.spatial.rotations import rpy_matrix
from src.utils.errors import UnknownEndEffector, ValidationError

DEFAULT_GRAVITY: Vec3 = (0.0, 0.0, -9.81)


class JointType(str, Enum):
    REVOLUTE = "revolute"
    PRISMATIC = "prismatic"
    FLOATING = "floating"


def frame_transform(xyz: Sequence[float], rpy: Sequence[float]) -> SpatialTransform:
    """Coordinate transform into a frame placed at ``xyz`` with orientation ``rpy``"""
    return SpatialTransform(transpose3(rpy_matrix(tuple(rpy))), tuple(xyz))


@dataclass(frozen=True)
class JointLimits:
    lower: float
    upper: float
    velocity: float


@dataclass(frozen=True)
class Joint:
    kind: JointType
    axis: Vec3 = (0.0, 0.0, 1.0)
    xyz: Vec3 = (0.0, 0.0, 0.0)
    rpy: Vec3 = (0.0, 0.0, 0.0)
    limits: Optional[JointLimits] = None

    @property
    def dof(self) -> int:
        return 6 if self.kind == JointType.FLOATING else 1

    @cached_property
    def parent_to_joint(self) -> SpatialTransform:
        return frame_transform(self.xyz, self.rpy)


@dataclass(frozen=True)
class Link:
    name: str
    parent_index: Optional[int]
    joint: Joint
    inertia: SpatialInertia


@dataclass(frozen=True)
class EndEffector:
    name: str
    link_index: int
    xyz: Vec3 = (0.0, 0.0, 0.0)
    rpy: Vec3 = (0.0, 0.0, 0.0)

    @cached_property
    def offset(self) -> SpatialTransform:
        return frame_transform(self.xyz, self.rpy)


@dataclass(frozen=True)
class RobotModel:
    """
    Topologically sorted kinematic tree

    Generalized coordinates follow link order; a floating base (always link 0)
    contributes q = [Euler XYZ angles, position] and qd = [body angular
    velocity, body linear velocity].
    """

    name: str
    links: Tuple[Link, ...]
    end_effectors: Tuple[EndEffector, ...] = ()
    gravity: Vec3 = DEFAULT_GRAVITY

    @property
    def n_links(self) -> int:
        return len(self.links)

    @cached_property
    def has_floating_base(self) -> bool:
        return any(link.joint.kind == JointType.FLOATING for link in self.links)

    @cached_property
    def dof_offsets(self) -> Tuple[int, ...]:
        """Index of each link's first coordinate in q and qd"""
        offsets = []
        total = 0
        for link in self.links:
            offsets.append(total)
            total += link.joint.dof
        return tuple(offsets)

    @cached_property
    def nv(self) -> int:
        return sum(link.joint.dof for link in self.links)

    @property
    def nq(self) -> int:
        # Three-parameter orientation keeps nq equal to nv
        return self.nv

    @cached_property
    def nu(self) -> int:
        return self.nv - 6 if self.has_floating_base else self.nv

    @cached_property
    def actuated_indices(self) -> Tuple[int, ...]:
        start = 6 if self.has_floating_base else 0
        return tuple(range(start, self.nv))

    @cached_property
    def dof_parents(self) -> Tuple[int, ...]:
        """Parent DoF of every DoF in the expanded tree (-1 for the root)"""
        parents: List[int] = []
        for i, link in enumerate(self.links):
            offset = self.dof_offsets[i]
            if link.parent_index is None:
                first_parent = -1
            else:
                p = link.parent_index
                first_parent = self.dof_offsets[p] + self.links[p].joint.dof - 1
            parents.append(first_parent)
            parents.extend(range(offset, offset + link.joint.dof - 1))
        return tuple(parents)

    def selection_matrix(self) -> np.ndarray:
        """S (nu × nv) mapping generalized forces onto actuated joints"""
        S = np.zeros((self.nu, self.nv))
        for row, col in enumerate(self.actuated_indices):
            S[row, col] = 1.0
        return S

    def link_index(self, name: str) -> int:
        for i, link in enumerate(self.links):
            if link.name == name:
                return i
        raise ValidationError(f"Unknown link '{name}' in model '{self.name}'")

    def end_effector(self, key: Union[str, int]) -> EndEffector:
        """Look up an end-effector by name or index"""
        if isinstance(key, str):
            for ee in self.end_effectors:
                if ee.name == key:
                    return ee
            raise UnknownEndEffector(f"No end-effector named '{key}' in model '{self.name}'")
        if isinstance(key, (int, np.integer)) and 0 <= key < len(self.end_effectors):
            return self.end_effectors[key]
        raise UnknownEndEffector(f"No end-effector with index {key!r} in model '{self.name}'")

    def ancestors(self, index: int) -> List[int]:
        """Link indices from ``index`` up to the root, inclusive"""
        chain = []
        current: Optional[int] = index
        while current is not None:
            chain.append(current)
            current = self.links[current].parent_index
        return chain

    def total_mass(self) -> float:
        return float(sum(link.inertia.mass for link in self.links))

    def with_link_inertia(self, index: int, inertia: SpatialInertia) -> "RobotModel":
        """Copy of the model with one link's inertia replaced (entries may be AD scalars)"""
        links = list(self.links)
        links[index] = replace(links[index], inertia=inertia)
        return replace(self, links=tuple(links))

    def with_gravity(self, gravity: Sequence[float]) -> "RobotModel":
        return replace(self, gravity=tuple(float(g) for g in gravity))


def state_dimensions(model: RobotModel) -> Tuple[int, int, int]:
    """(nq, nv, nu) of a model"""
    return model.nq, model.nv, model.nu


__all__ = [
    "JointType",
    "JointLimits",
    "Joint",
    "Link",
    "EndEffector",
    "RobotModel",
    "DEFAULT_GRAVITY",
    "frame_transform",
    "state_dimensions",
]
