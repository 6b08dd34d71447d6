"""
Reader and writer for the line-oriented robot model format.

    robot <name>
    gravity <gx> <gy> <gz>
    link <name> parent <parent|world> joint <revolute|prismatic|floating> axis <x y z> xyz <x y z> rpy <r p y> [limits <lower> <upper> <velocity>]
    inertia <link> mass <m> com <cx cy cz> ixx <> iyy <> izz <> ixy <> ixz <> iyz <>
    endeffector <name> link <link> xyz <x y z> rpy <r p y>

``#`` starts a comment. Inertia entries are about the centre of mass.
"""
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.model.robot_model import (
    DEFAULT_GRAVITY,
    EndEffector,
    Joint,
    JointLimits,
    JointType,
    Link,
    RobotModel,
)
from src.spatial.algebra import SpatialInertia
from src.utils.errors import ParseError, ValidationError
from src.utils.logger import get_logger
from src.utils.validators import FileValidator

logger = get_logger(__name__)

AXIS_TOLERANCE = 1e-12
INERTIA_KEYS = ("ixx", "iyy", "izz", "ixy", "ixz", "iyz")


class _Tokens:
    """Cursor over the tokens of one line"""

    def __init__(self, tokens: List[str], line: int):
        self.tokens = tokens
        self.line = line
        self.pos = 1

    def word(self, what: str) -> str:
        if self.pos >= len(self.tokens):
            raise ParseError(f"expected {what}", self.line)
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def keyword(self, expected: str):
        token = self.word(f"'{expected}'")
        if token != expected:
            raise ParseError(f"expected '{expected}', found '{token}'", self.line)

    def number(self, what: str) -> float:
        token = self.word(what)
        try:
            value = float(token)
        except ValueError:
            raise ParseError(f"{what}: '{token}' is not a number", self.line) from None
        if not math.isfinite(value):
            raise ParseError(f"{what}: '{token}' is not finite", self.line)
        return value

    def vector(self, keyword: str) -> Tuple[float, float, float]:
        self.keyword(keyword)
        return (self.number(keyword), self.number(keyword), self.number(keyword))

    def has_more(self) -> bool:
        return self.pos < len(self.tokens)

    def done(self):
        if self.has_more():
            raise ParseError(f"unexpected trailing token '{self.tokens[self.pos]}'", self.line)


def _inertia_matrix(values: Dict[str, float]):
    ixx, iyy, izz = values["ixx"], values["iyy"], values["izz"]
    ixy, ixz, iyz = values["ixy"], values["ixz"], values["iyz"]
    return ((ixx, ixy, ixz), (ixy, iyy, iyz), (ixz, iyz, izz))


def validate_inertia(link_name: str, inertia: SpatialInertia):
    """Mass positive, rotational inertia positive definite and physically consistent"""
    if not inertia.mass > 0.0:
        raise ValidationError(f"Link '{link_name}' has non-positive mass {inertia.mass}")
    matrix = np.array(inertia.rotational_inertia, dtype=float)
    if not np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-12):
        raise ValidationError(f"Inertia of link '{link_name}' is not symmetric")
    principal = np.linalg.eigvalsh(matrix)
    if principal.min() <= 0.0:
        raise ValidationError(f"Inertia of link '{link_name}' is not positive definite")
    slack = 1e-12 * principal.max()
    a, b, c = principal
    if a + b < c - slack or a + c < b - slack or b + c < a - slack:
        raise ValidationError(f"Inertia of link '{link_name}' violates the triangle inequality")


def parse_model(text: str) -> RobotModel:
    """
    Parse a model description

    Args:
        text: Contents of a model file

    Returns:
        Validated, topologically sorted RobotModel
    """
    name: Optional[str] = None
    gravity = DEFAULT_GRAVITY
    link_specs: List[Tuple[int, str, str, Joint]] = []
    inertias: Dict[str, Tuple[int, SpatialInertia]] = {}
    ee_specs: List[Tuple[int, str, str, tuple, tuple]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = _Tokens(content.split(), line_no)
        keyword = tokens.tokens[0]

        if keyword == "robot":
            name = tokens.word("robot name")
        elif keyword == "gravity":
            gravity = (tokens.number("gx"), tokens.number("gy"), tokens.number("gz"))
        elif keyword == "link":
            link_name = tokens.word("link name")
            tokens.keyword("parent")
            parent = tokens.word("parent name")
            tokens.keyword("joint")
            kind_token = tokens.word("joint type")
            try:
                kind = JointType(kind_token)
            except ValueError:
                raise ParseError(f"unknown joint type '{kind_token}'", line_no) from None
            axis = tokens.vector("axis")
            xyz = tokens.vector("xyz")
            rpy = tokens.vector("rpy")
            limits = None
            if tokens.has_more():
                tokens.keyword("limits")
                limits = JointLimits(tokens.number("lower"), tokens.number("upper"), tokens.number("velocity"))
            joint = Joint(kind=kind, axis=axis, xyz=xyz, rpy=rpy, limits=limits)
            link_specs.append((line_no, link_name, parent, joint))
        elif keyword == "inertia":
            link_name = tokens.word("link name")
            tokens.keyword("mass")
            mass = tokens.number("mass")
            com = tokens.vector("com")
            values = {}
            for key in INERTIA_KEYS:
                tokens.keyword(key)
                values[key] = tokens.number(key)
            if link_name in inertias:
                raise ValidationError(f"Duplicate inertia for link '{link_name}' (line {line_no})")
            inertias[link_name] = (line_no, SpatialInertia(mass, com, _inertia_matrix(values)))
        elif keyword == "endeffector":
            ee_name = tokens.word("end-effector name")
            tokens.keyword("link")
            link_name = tokens.word("link name")
            xyz = tokens.vector("xyz")
            rpy = tokens.vector("rpy")
            ee_specs.append((line_no, ee_name, link_name, xyz, rpy))
        else:
            raise ParseError(f"unknown keyword '{keyword}'", line_no)
        tokens.done()

    if name is None:
        raise ValidationError("Model has no 'robot <name>' declaration")
    if not link_specs:
        raise ValidationError(f"Model '{name}' has no links")

    indices: Dict[str, int] = {}
    links: List[Link] = []
    for line_no, link_name, parent, joint in link_specs:
        if link_name in indices or link_name == "world":
            raise ValidationError(f"Duplicate link name '{link_name}' (line {line_no})")
        if parent == link_name:
            raise ValidationError(f"Link '{link_name}' is its own parent, the tree has a cycle (line {line_no})")

        if parent == "world":
            parent_index = None
        elif parent in indices:
            parent_index = indices[parent]
        else:
            raise ValidationError(
                f"Parent '{parent}' of link '{link_name}' is not defined before it (line {line_no})"
            )

        if joint.kind == JointType.FLOATING:
            if parent_index is not None or links:
                raise ValidationError(f"Floating base '{link_name}' must be the first link, attached to world")
        else:
            norm = math.sqrt(sum(a * a for a in joint.axis))
            if abs(norm - 1.0) > AXIS_TOLERANCE:
                raise ValidationError(f"Joint axis of link '{link_name}' is not a unit vector (norm {norm})")

        if link_name not in inertias:
            raise ValidationError(f"Link '{link_name}' has no inertia line")
        inertia = inertias[link_name][1]
        validate_inertia(link_name, inertia)

        indices[link_name] = len(links)
        links.append(Link(name=link_name, parent_index=parent_index, joint=joint, inertia=inertia))

    for link_name, (line_no, _) in inertias.items():
        if link_name not in indices:
            raise ValidationError(f"Inertia given for unknown link '{link_name}' (line {line_no})")

    if any(link.joint.kind == JointType.FLOATING for link in links):
        roots = [link.name for link in links if link.parent_index is None]
        if len(roots) > 1:
            raise ValidationError(f"Floating-base model has several roots: {roots}")

    end_effectors: List[EndEffector] = []
    seen = set()
    for line_no, ee_name, link_name, xyz, rpy in ee_specs:
        if ee_name in seen:
            raise ValidationError(f"Duplicate end-effector name '{ee_name}' (line {line_no})")
        if link_name not in indices:
            raise ValidationError(f"End-effector '{ee_name}' refers to unknown link '{link_name}' (line {line_no})")
        seen.add(ee_name)
        end_effectors.append(EndEffector(name=ee_name, link_index=indices[link_name], xyz=xyz, rpy=rpy))

    return RobotModel(name=name, links=tuple(links), end_effectors=tuple(end_effectors), gravity=gravity)


def _fmt(values: Sequence[float]) -> str:
    return " ".join(repr(float(v)) for v in values)


def format_model(model: RobotModel) -> str:
    """Serialize a model so that ``parse_model(format_model(m)) == m``"""
    lines = [f"robot {model.name}", f"gravity {_fmt(model.gravity)}"]

    for link in model.links:
        parent = "world" if link.parent_index is None else model.links[link.parent_index].name
        joint = link.joint
        line = (
            f"link {link.name} parent {parent} joint {joint.kind.value} "
            f"axis {_fmt(joint.axis)} xyz {_fmt(joint.xyz)} rpy {_fmt(joint.rpy)}"
        )
        if joint.limits is not None:
            limits = joint.limits
            line += f" limits {_fmt((limits.lower, limits.upper, limits.velocity))}"
        lines.append(line)

    for link in model.links:
        mass, com, inertia = link.inertia
        (ixx, ixy, ixz), (_, iyy, iyz), (_, _, izz) = inertia
        lines.append(
            f"inertia {link.name} mass {_fmt([mass])} com {_fmt(com)} "
            f"ixx {_fmt([ixx])} iyy {_fmt([iyy])} izz {_fmt([izz])} "
            f"ixy {_fmt([ixy])} ixz {_fmt([ixz])} iyz {_fmt([iyz])}"
        )

    for ee in model.end_effectors:
        lines.append(
            f"endeffector {ee.name} link {model.links[ee.link_index].name} xyz {_fmt(ee.xyz)} rpy {_fmt(ee.rpy)}"
        )

    return "\n".join(lines) + "\n"


def load_model(path: Union[str, Path]) -> RobotModel:
    """Parse a model file from disk"""
    path = FileValidator.validate_model_file(path)
    model = parse_model(path.read_text(encoding="utf-8"))
    logger.info(
        f"Loaded model '{model.name}' from {path.name}: {model.n_links} links, "
        f"nv={model.nv}, nu={model.nu}, {len(model.end_effectors)} end-effectors"
    )
    return model


__all__ = ["parse_model", "format_model", "load_model", "validate_inertia"]
