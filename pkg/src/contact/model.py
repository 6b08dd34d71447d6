"""
Smooth spring-damper ground contact and the floating-base system dynamics
built on top of it.

Penetration is pz = surface height − foot z, positive below the surface. The
contact-frame force is

    λ_C = (0, 0, k·exp(α_k·pz)) − d·sig(α_d·pz)·ṗ

with ṗ the world-frame foot velocity and sig the logistic function.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from config.settings import settings
from src.autodiff import scalar
from src.autodiff.scalar import primal_value
from src.contact.params import ContactModelParams
from src.dynamics.aba import aba
from src.dynamics.rnea import rnea
from src.dynamics.state import check_dimensions, selection_transpose
from src.dynamics.tree import as_scalars, parent_transforms
from src.kinematics.forward import configuration_rate, link_velocities, point_velocity, world_poses
from src.model.robot_model import EndEffector, RobotModel
from src.spatial.algebra import ForceVector
from src.spatial.linalg3 import cross3, mat_t_vec, mat_vec
from src.spatial.rotations import euler_xyz_matrix
from src.utils.errors import DimensionError, NotFloatingBase, SingularOrientation, UnknownEndEffector, ValidationError
from src.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class SystemDynamicsConfig:
    """
    Robot, ground model and the end-effectors that touch the ground

    Args:
        model: Robot model
        contact: Ground parameters; None disables contact
        end_effectors: Contact point names; all registered end-effectors by default
    """

    model: RobotModel
    contact: Optional[ContactModelParams] = field(default_factory=ContactModelParams)
    end_effectors: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        names = self.end_effectors
        if names is None:
            names = tuple(ee.name for ee in self.model.end_effectors) if self.contact is not None else ()
        # raises UnknownEndEffector for unregistered names
        resolved = tuple(self.model.end_effector(name) for name in names)
        object.__setattr__(self, "end_effectors", tuple(ee.name for ee in resolved))
        object.__setattr__(self, "_contacts", resolved)

    @property
    def contacts(self) -> Tuple[EndEffector, ...]:
        return self._contacts

    @property
    def state_dimension(self) -> int:
        return self.model.nq + self.model.nv

    @property
    def input_dimension(self) -> int:
        return self.model.nu


def contact_force_contact_frame(params: ContactModelParams, pz, pdot: Sequence) -> List:
    """
    Ground reaction in the contact (world-aligned) frame

    Args:
        params: Ground parameters
        pz: Penetration depth, positive below the surface (m)
        pdot: Foot velocity (m/s)

    Returns:
        [λx, λy, λz] (N)
    """
    spring = params.k * scalar.exp(params.alpha_k * pz)
    damping = params.d * scalar.sigmoid(params.alpha_d * pz)
    return [
        -(damping * pdot[0]),
        -(damping * pdot[1]),
        spring - damping * pdot[2],
    ]


def _check_orientation(q: Sequence):
    pitch = primal_value(q[1])
    if abs(pitch) > settings.SINGULAR_PITCH:
        raise SingularOrientation(
            f"Pitch {pitch:.4f} rad exceeds {settings.SINGULAR_PITCH} rad (Euler singularity)"
        )


def _foot_states(config: SystemDynamicsConfig, q: list, qd: list):
    model = config.model
    X_up = parent_transforms(model, q)
    poses = world_poses(model, X_up)
    velocities = link_velocities(model, q, qd, X_up)
    for effector in config.contacts:
        link = effector.link_index
        pose = poses[link]
        position = mat_t_vec(pose.rotation, effector.xyz)
        position = tuple(p + t for p, t in zip(position, pose.translation))
        yield effector, pose, position, point_velocity(pose, velocities[link], effector.xyz)


def _world_contact_forces(config: SystemDynamicsConfig, q: list, qd: list):
    params = config.contact
    for effector, pose, position, velocity in _foot_states(config, q, qd):
        pz = params.surface_height - position[2]
        yield effector, pose, contact_force_contact_frame(params, pz, velocity)


def contact_force_body_frame(config: SystemDynamicsConfig, q: Sequence, qd: Sequence, foot) -> ForceVector:
    """
    Contact force of one foot rotated into the base-body frame

    Args:
        config: System configuration (floating base)
        q, qd: Generalized position and velocity
        foot: Contact point name, or index into ``config.contacts``

    Returns:
        ForceVector with zero torque (the force acts at the foot point)
    """
    model = config.model
    if not model.has_floating_base:
        raise NotFloatingBase(f"Model '{model.name}' has no floating base")
    check_dimensions(model, q=q, qd=qd)
    if config.contact is None:
        raise ValidationError("Contact forces requested from a configuration without contact parameters")
    q, qd = as_scalars(q), as_scalars(qd)
    if isinstance(foot, str):
        target = model.end_effector(foot)
    elif 0 <= int(foot) < len(config.contacts):
        target = config.contacts[int(foot)]
    else:
        raise UnknownEndEffector(f"No contact point with index {foot!r}")

    single = SystemDynamicsConfig(model, config.contact, (target.name,))
    _, _, world_force = next(_world_contact_forces(single, q, qd))
    rotation = euler_xyz_matrix((q[0], q[1], q[2]))
    return ForceVector((0.0, 0.0, 0.0), mat_t_vec(rotation, world_force))


def contact_external_forces(config: SystemDynamicsConfig, q: Sequence, qd: Sequence) -> List[Optional[ForceVector]]:
    """
    Per-link spatial contact forces in link coordinates, as taken by ``rnea``/``aba``

    Returns:
        One entry per link; None for links without a contact point
    """
    model = config.model
    q, qd = as_scalars(q), as_scalars(qd)
    forces: List[Optional[ForceVector]] = [None] * model.n_links
    if config.contact is None:
        return forces
    for effector, pose, world_force in _world_contact_forces(config, q, qd):
        local = mat_vec(pose.rotation, world_force)
        wrench = ForceVector(cross3(effector.xyz, local), local)
        link = effector.link_index
        previous = forces[link]
        if previous is not None:
            wrench = ForceVector(
                tuple(a + b for a, b in zip(previous.torque, wrench.torque)),
                tuple(a + b for a, b in zip(previous.force, wrench.force)),
            )
        forces[link] = wrench
    return forces


def system_dynamics(config: SystemDynamicsConfig, x: Sequence, u: Sequence) -> List:
    """
    Continuous-time dynamics ẋ = f(x, u) with x = [q, qd]

    Args:
        config: System configuration
        x: State (nq + nv)
        u: Actuated joint torques (nu)

    Returns:
        ẋ = [configuration rate, forward dynamics with contact forces]
    """
    model = config.model
    x = as_scalars(x)
    u = as_scalars(u)
    if len(x) != config.state_dimension:
        raise DimensionError(f"State has size {len(x)}, expected {config.state_dimension}")
    if len(u) != config.input_dimension:
        raise DimensionError(f"Input has size {len(u)}, expected {config.input_dimension}")

    q, qd = x[:model.nq], x[model.nq:]
    if model.has_floating_base:
        _check_orientation(q)
    ext = contact_external_forces(config, q, qd) if config.contact is not None else None
    qdd = aba(model, q, qd, selection_transpose(model, u), ext)
    return configuration_rate(model, q, qd) + list(qdd)


def standing_height(config: SystemDynamicsConfig, joint_positions: Optional[Sequence[float]] = None) -> float:
    """
    Base height at which the static contact forces carry the robot's weight

    Orientation is level, velocities are zero. The root is bracketed between
    the height where the lowest foot touches the surface and one where every
    foot hangs well above it.

    Args:
        config: Floating-base system with contact
        joint_positions: Actuated joint angles; zeros (straight legs) by default

    Returns:
        Base z coordinate (m)
    """
    model = config.model
    if not model.has_floating_base:
        raise NotFloatingBase(f"Model '{model.name}' has no floating base")
    params = config.contact
    joints = np.zeros(model.nu) if joint_positions is None else np.asarray(joint_positions, dtype=float)
    q0 = np.concatenate([np.zeros(6), joints])
    zeros = [0.0] * model.nv
    foot_z = np.array([p[2] for _, _, p, _ in _foot_states(config, q0.tolist(), zeros)])
    weight = model.total_mass() * abs(model.gravity[2])

    def excess_support(height: float) -> float:
        pz = params.surface_height - (foot_z + height)
        return float(np.sum(params.k * np.exp(params.alpha_k * pz))) - weight

    touch = params.surface_height - foot_z.min()
    high = touch + 50.0 / params.alpha_k
    height = brentq(excess_support, touch - 1.0, high, xtol=1e-12)
    logger.debug(f"Standing height for '{model.name}': {height:.6f} m")
    return float(height)


def standing_state(config: SystemDynamicsConfig, joint_positions: Optional[Sequence[float]] = None) -> np.ndarray:
    """Level, motionless state at ``standing_height``"""
    model = config.model
    joints = np.zeros(model.nu) if joint_positions is None else np.asarray(joint_positions, dtype=float)
    height = standing_height(config, joints)
    q = np.concatenate([np.zeros(5), [height], joints])
    return np.concatenate([q, np.zeros(model.nv)])


def static_torques(config: SystemDynamicsConfig, x: Sequence[float]) -> np.ndarray:
    """
    Actuated torques holding a motionless state, given the contact forces there

    Returns:
        u (nu): actuated rows of rnea(q, 0, 0, contact forces)
    """
    model = config.model
    x = np.asarray(x, dtype=float)
    q = x[:model.nq].tolist()
    zeros = [0.0] * model.nv
    ext = contact_external_forces(config, q, zeros) if config.contact is not None else None
    tau = rnea(model, q, zeros, zeros, ext)
    return np.array([tau[i] for i in model.actuated_indices], dtype=float)


__all__ = [
    "SystemDynamicsConfig",
    "contact_force_contact_frame",
    "contact_force_body_frame",
    "contact_external_forces",
    "system_dynamics",
    "standing_height",
    "standing_state",
    "static_torques",
]
