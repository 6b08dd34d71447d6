"""
Flat vector functions x -> y over the dynamics, the shape every
derivative provider works with.

Input layouts:
    fd          [q, qd, τ_a]              -> qdd
    id          [q, qd, qdd]              -> τ
    fbid        [q, qd, qdd_a]            -> τ_a
    kinematics  [q, qd]                   -> [p_1..p_k, ṗ_1..ṗ_k]
    system      [q, qd, u]                -> ẋ
An ``id`` function may also carry the ten inertial parameters of one link
as trailing inputs.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.contact.model import SystemDynamicsConfig, contact_external_forces, system_dynamics
from src.dynamics.aba import aba
from src.dynamics.floating import floating_base_inverse_dynamics
from src.dynamics.rnea import rnea
from src.dynamics.state import random_configuration, selection_transpose
from src.kinematics.forward import feet_kinematics
from src.model.robot_model import RobotModel
from src.spatial.algebra import SpatialInertia
from src.utils.errors import NotFloatingBase, ValidationError

INERTIA_PARAMETERS = ("m", "cx", "cy", "cz", "ixx", "iyy", "izz", "ixy", "ixz", "iyz")


class FunctionKind(str, Enum):
    FORWARD_DYNAMICS = "fd"
    INVERSE_DYNAMICS = "id"
    FLOATING_BASE_ID = "fbid"
    KINEMATICS = "kinematics"
    SYSTEM_DYNAMICS = "system"


def inertia_parameters(inertia: SpatialInertia) -> List[float]:
    """(m, c, ixx, iyy, izz, ixy, ixz, iyz) of a spatial inertia"""
    (ixx, ixy, ixz), (_, iyy, iyz), (_, _, izz) = inertia.rotational_inertia
    return [inertia.mass, *inertia.com, ixx, iyy, izz, ixy, ixz, iyz]


def inertia_from_parameters(theta: Sequence) -> SpatialInertia:
    m, cx, cy, cz, ixx, iyy, izz, ixy, ixz, iyz = theta
    return SpatialInertia(m, (cx, cy, cz), ((ixx, ixy, ixz), (ixy, iyy, iyz), (ixz, iyz, izz)))


@dataclass(frozen=True)
class FlatFunction:
    """Scalar-generic map on flat lists, with the block structure of its input"""

    name: str
    evaluate: Callable[[list], list]
    blocks: Tuple[Tuple[str, int], ...]
    n_out: int

    @property
    def n_in(self) -> int:
        return sum(size for _, size in self.blocks)

    def __call__(self, x) -> list:
        if isinstance(x, np.ndarray):
            x = x.tolist()
        return self.evaluate(list(x))

    def block_slices(self) -> Dict[str, slice]:
        slices = {}
        start = 0
        for name, size in self.blocks:
            slices[name] = slice(start, start + size)
            start += size
        return slices

    def columns(self, block: str) -> List[int]:
        return list(range(self.n_in))[self.block_slices()[block]]


def _external(contact: Optional[SystemDynamicsConfig], q, qd):
    if contact is None or contact.contact is None:
        return None
    return contact_external_forces(contact, q, qd)


def build_function(
    model: RobotModel,
    kind: FunctionKind,
    contact: Optional[SystemDynamicsConfig] = None,
    parameter_link: Optional[int] = None,
) -> FlatFunction:
    """
    Flat function of the requested kind

    Args:
        model: Robot model
        kind: Which map
        contact: Optional contact configuration; forces enter as λ(q, qd)
        parameter_link: For ``id`` only, lift this link's inertial parameters into the inputs

    Returns:
        FlatFunction
    """
    kind = FunctionKind(kind)
    nq, nv, nu = model.nq, model.nv, model.nu
    if contact is not None and contact.model != model:
        raise ValidationError("Contact configuration belongs to a different model")
    if parameter_link is not None and kind != FunctionKind.INVERSE_DYNAMICS:
        raise ValidationError("Inertial parameters can only be lifted into inverse dynamics")

    if kind == FunctionKind.FORWARD_DYNAMICS:

        def fd(x):
            q, qd, tau = x[:nq], x[nq:nq + nv], x[nq + nv:]
            return aba(model, q, qd, selection_transpose(model, tau), _external(contact, q, qd))

        return FlatFunction("fd", fd, (("q", nq), ("qd", nv), ("tau", nu)), nv)

    if kind == FunctionKind.INVERSE_DYNAMICS:
        if parameter_link is None:

            def inverse(x):
                q, qd, qdd = x[:nq], x[nq:nq + nv], x[nq + nv:]
                return rnea(model, q, qd, qdd, _external(contact, q, qd))

            return FlatFunction("id", inverse, (("q", nq), ("qd", nv), ("qdd", nv)), nv)

        n_state = nq + 2 * nv

        def inverse_parametrized(x):
            q, qd, qdd = x[:nq], x[nq:nq + nv], x[nq + nv:n_state]
            lifted = model.with_link_inertia(parameter_link, inertia_from_parameters(x[n_state:]))
            return rnea(lifted, q, qd, qdd, _external(contact, q, qd))

        blocks = (("q", nq), ("qd", nv), ("qdd", nv), ("theta", len(INERTIA_PARAMETERS)))
        return FlatFunction(f"id_link{parameter_link}", inverse_parametrized, blocks, nv)

    if kind == FunctionKind.FLOATING_BASE_ID:
        if not model.has_floating_base:
            raise NotFloatingBase(f"Model '{model.name}' has no floating base")

        def fbid(x):
            q, qd, qdd_a = x[:nq], x[nq:nq + nv], x[nq + nv:]
            return floating_base_inverse_dynamics(model, q, qd, qdd_a, _external(contact, q, qd))

        return FlatFunction("fbid", fbid, (("q", nq), ("qd", nv), ("qdd_a", nu)), nu)

    if kind == FunctionKind.KINEMATICS:
        if not model.end_effectors:
            raise ValidationError(f"Model '{model.name}' has no end-effectors")

        def kinematics(x):
            return feet_kinematics(model, x[:nq], x[nq:])

        return FlatFunction("kinematics", kinematics, (("q", nq), ("qd", nv)), 6 * len(model.end_effectors))

    config = contact if contact is not None else SystemDynamicsConfig(model, None)

    def dynamics(x):
        return system_dynamics(config, x[:nq + nv], x[nq + nv:])

    return FlatFunction("system", dynamics, (("q", nq), ("qd", nv), ("u", nu)), nq + nv)


def sample_point(
    model: RobotModel,
    function: FlatFunction,
    rng: np.random.Generator,
    parameter_link: Optional[int] = None,
) -> np.ndarray:
    """Random non-singular input point matching the function's layout"""
    parts = []
    for name, size in function.blocks:
        if name == "q":
            parts.append(random_configuration(model, rng))
        elif name == "theta":
            parts.append(np.array(inertia_parameters(model.links[parameter_link].inertia), dtype=float))
        else:
            parts.append(rng.uniform(-1.0, 1.0, size=size))
    return np.concatenate(parts)


__all__ = [
    "FunctionKind",
    "FlatFunction",
    "INERTIA_PARAMETERS",
    "inertia_parameters",
    "inertia_from_parameters",
    "build_function",
    "sample_point",
]
