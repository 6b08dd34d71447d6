"""
Generalized state containers and sampling helpers
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from config.settings import settings
from src.model.robot_model import JointType, RobotModel
from src.spatial.algebra import ForceVector
from src.utils.validators import ArrayValidator


@dataclass(frozen=True)
class GeneralizedState:
    """q = [Euler XYZ, position, joints] for floating-base models; qd body-frame base velocities first"""

    q: np.ndarray
    qd: np.ndarray

    @classmethod
    def for_model(cls, model: RobotModel, q, qd) -> "GeneralizedState":
        return cls(
            ArrayValidator.as_vector(q, model.nq, "q"),
            ArrayValidator.as_vector(qd, model.nv, "qd"),
        )

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.qd])


def check_dimensions(model: RobotModel, q=None, qd=None, qdd=None, tau=None, ext_forces=None):
    """Raise DimensionError when a generalized vector does not match the model"""
    if q is not None:
        ArrayValidator.check_length(q, model.nq, "q")
    if qd is not None:
        ArrayValidator.check_length(qd, model.nv, "qd")
    if qdd is not None:
        ArrayValidator.check_length(qdd, model.nv, "qdd")
    if tau is not None:
        ArrayValidator.check_length(tau, model.nv, "tau")
    if ext_forces is not None:
        ArrayValidator.check_length(ext_forces, model.n_links, "ext_forces")


def selection_transpose(model: RobotModel, tau_actuated: Sequence) -> List:
    """Sᵀ τ_a: full generalized force with unactuated floating-base rows set to zero"""
    ArrayValidator.check_length(tau_actuated, model.nu, "tau_actuated")
    tau = [0.0] * model.nv
    for value, index in zip(tau_actuated, model.actuated_indices):
        tau[index] = value
    return tau


def no_external_forces(model: RobotModel) -> List[Optional[ForceVector]]:
    return [None] * model.n_links


def random_configuration(model: RobotModel, rng: np.random.Generator, max_pitch: Optional[float] = None) -> np.ndarray:
    """
    Uniform random q within joint limits (±π when unset)

    Floating-base roll and yaw are drawn in ±π, pitch in ±max_pitch, position in ±1 m.
    """
    max_pitch = settings.MAX_FLOATING_PITCH if max_pitch is None else max_pitch
    q = np.zeros(model.nq)
    for i, link in enumerate(model.links):
        offset = model.dof_offsets[i]
        joint = link.joint
        if joint.kind == JointType.FLOATING:
            q[offset] = rng.uniform(-math.pi, math.pi)
            q[offset + 1] = rng.uniform(-max_pitch, max_pitch)
            q[offset + 2] = rng.uniform(-math.pi, math.pi)
            q[offset + 3:offset + 6] = rng.uniform(-1.0, 1.0, size=3)
        elif joint.limits is not None:
            q[offset] = rng.uniform(joint.limits.lower, joint.limits.upper)
        else:
            q[offset] = rng.uniform(-math.pi, math.pi)
    return q


def random_state(model: RobotModel, rng: np.random.Generator, velocity_scale: float = 1.0) -> GeneralizedState:
    """Random (q, qd) with qd uniform in ±velocity_scale"""
    q = random_configuration(model, rng)
    qd = rng.uniform(-velocity_scale, velocity_scale, size=model.nv)
    return GeneralizedState(q, qd)


__all__ = [
    "GeneralizedState",
    "check_dimensions",
    "selection_transpose",
    "no_external_forces",
    "random_configuration",
    "random_state",
]
