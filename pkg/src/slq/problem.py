"""
SLQ problem definitions: the JSON problem file schema, the numeric problem
built from it, and the initial affine controllers.
"""
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, PositiveFloat, PositiveInt
from pydantic import ValidationError as PydanticValidationError

from config.settings import settings
from src.contact.model import SystemDynamicsConfig, standing_state, static_torques
from src.contact.params import ContactModelParams
from src.dynamics.floating import floating_base_inverse_dynamics
from src.dynamics.rnea import rnea
from src.model.parser import load_model
from src.model.robot_model import RobotModel
from src.utils.errors import DimensionError, ValidationError
from src.utils.logger import get_logger
from src.utils.validators import ArrayValidator, FileValidator

logger = get_logger(__name__)

WeightSpec = Union[float, List[float], List[List[float]]]


class InitialController(str, Enum):
    ZERO = "zero"
    GRAVITY_COMPENSATION = "gravity_compensation"
    STANDING = "standing"


class SlqSolverOptions(BaseModel):
    """Line search and regularization schedule"""

    max_iterations: PositiveInt = 50
    tolerance: PositiveFloat = 1e-6
    line_search_factor: float = Field(0.5, gt=0.0, lt=1.0)
    min_step: PositiveFloat = 1e-4
    mu_min: PositiveFloat = 1e-6
    mu_increase: float = Field(10.0, gt=1.0)
    mu_decrease: float = Field(5.0, gt=1.0)
    mu_max: PositiveFloat = 1e10


class SlqProblemConfig(BaseModel):
    """Problem file contents"""

    name: str
    model: str = Field(..., description="Model file, relative to the problem file or MODELS_DIR")
    horizon: PositiveFloat = Field(..., description="T (s)")
    dt: PositiveFloat = Field(0.01, description="Step (s)")
    Q: WeightSpec
    R: WeightSpec
    Q_final: WeightSpec
    x0: Optional[List[float]] = None
    x_nominal: Optional[List[float]] = None
    x_final: Optional[List[float]] = None
    base_displacement: Optional[List[float]] = Field(None, description="Added to the final base position")
    u_nominal: Optional[List[float]] = None
    initial_controller: InitialController = InitialController.ZERO
    kp: float = Field(0.0, ge=0.0, description="Standing controller position gain")
    kd: float = Field(0.0, ge=0.0, description="Standing controller velocity gain")
    contact: Optional[ContactModelParams] = None
    end_effectors: Optional[List[str]] = None
    solver: SlqSolverOptions = SlqSolverOptions()


@dataclass(frozen=True, eq=False)
class AffineController:
    """u_t = u_ff[t] + K[t] (x − x_ref[t])"""

    u_ff: np.ndarray
    K: np.ndarray
    x_ref: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.u_ff.shape[0]

    def __call__(self, t: int, x: np.ndarray) -> np.ndarray:
        return self.u_ff[t] + self.K[t] @ (x - self.x_ref[t])

    @classmethod
    def constant(cls, u: np.ndarray, n_steps: int, x_ref: np.ndarray, K: Optional[np.ndarray] = None) -> "AffineController":
        nu, nx = u.size, x_ref.size
        gain = np.zeros((nu, nx)) if K is None else K
        return cls(
            u_ff=np.tile(u, (n_steps, 1)),
            K=np.tile(gain, (n_steps, 1, 1)),
            x_ref=np.tile(x_ref, (n_steps, 1)),
        )


@dataclass(frozen=True, eq=False)
class SlqProblem:
    """Numeric optimal control problem"""

    name: str
    system: SystemDynamicsConfig
    Q: np.ndarray
    R: np.ndarray
    Q_final: np.ndarray
    x0: np.ndarray
    x_nominal: np.ndarray
    x_final: np.ndarray
    u_nominal: np.ndarray
    horizon: float
    dt: float
    initial_controller: AffineController
    options: SlqSolverOptions = SlqSolverOptions()

    def __post_init__(self):
        nx, nu = self.nx, self.nu
        ArrayValidator.as_matrix(self.Q, (nx, nx), "Q")
        ArrayValidator.as_matrix(self.Q_final, (nx, nx), "Q_final")
        ArrayValidator.as_matrix(self.R, (nu, nu), "R")
        for name, vector, size in (
            ("x0", self.x0, nx),
            ("x_nominal", self.x_nominal, nx),
            ("x_final", self.x_final, nx),
            ("u_nominal", self.u_nominal, nu),
        ):
            ArrayValidator.as_vector(vector, size, name)
        for name, matrix in (("Q", self.Q), ("Q_final", self.Q_final), ("R", self.R)):
            if not ArrayValidator.is_symmetric(matrix, tol=1e-12):
                raise ValidationError(f"{name} must be symmetric")
        if not ArrayValidator.is_positive_semidefinite(self.Q) or not ArrayValidator.is_positive_semidefinite(self.Q_final):
            raise ValidationError("Q and Q_final must be positive semidefinite")
        if np.linalg.eigvalsh(self.R).min() <= 0.0:
            raise ValidationError("R must be positive definite")
        steps = self.horizon / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValidationError(f"Horizon {self.horizon} is not a whole number of {self.dt} s steps")
        if self.initial_controller.n_steps != self.n_steps:
            raise DimensionError(
                f"Initial controller has {self.initial_controller.n_steps} steps, expected {self.n_steps}"
            )

    @property
    def model(self) -> RobotModel:
        return self.system.model

    @property
    def nx(self) -> int:
        return self.system.state_dimension

    @property
    def nu(self) -> int:
        return self.system.input_dimension

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))


def weight_matrix(spec: WeightSpec, size: int, name: str) -> np.ndarray:
    """Scalar → s·I, flat list → diagonal, nested list → full matrix"""
    if isinstance(spec, (int, float)):
        return float(spec) * np.eye(size)
    array = np.asarray(spec, dtype=float)
    if array.ndim == 1:
        return np.diag(ArrayValidator.as_vector(array, size, name))
    return ArrayValidator.as_matrix(array, (size, size), name)


def gravity_compensation_torques(model: RobotModel, x: np.ndarray) -> np.ndarray:
    """Actuated rows of G(q)"""
    q = x[:model.nq].tolist()
    zeros = [0.0] * model.nv
    if model.has_floating_base:
        return np.array(floating_base_inverse_dynamics(model, q, zeros, [0.0] * model.nu), dtype=float)
    tau = rnea(model, q, zeros, zeros)
    return np.array([tau[i] for i in model.actuated_indices], dtype=float)


def standing_gains(model: RobotModel, kp: float, kd: float) -> np.ndarray:
    """PD feedback u = −kp Δq_a − kd Δqd_a on the actuated joints"""
    K = np.zeros((model.nu, model.nq + model.nv))
    for row, dof in enumerate(model.actuated_indices):
        K[row, dof] = -kp
        K[row, model.nq + dof] = -kd
    return K


def initial_controller(
    kind: InitialController,
    system: SystemDynamicsConfig,
    x0: np.ndarray,
    n_steps: int,
    kp: float = 0.0,
    kd: float = 0.0,
) -> AffineController:
    """
    Stable starting controller

    zero: u = 0. gravity_compensation: u = G(q0), constant. standing: the
    torques holding x0 against gravity and contact forces, plus PD feedback.
    """
    model = system.model
    kind = InitialController(kind)
    if kind == InitialController.ZERO:
        return AffineController.constant(np.zeros(model.nu), n_steps, x0)
    if kind == InitialController.GRAVITY_COMPENSATION:
        return AffineController.constant(gravity_compensation_torques(model, x0), n_steps, x0)
    u = static_torques(system, x0)
    return AffineController.constant(u, n_steps, x0, standing_gains(model, kp, kd))


def _resolve_model_path(name: str, base: Optional[Path]) -> Path:
    candidates = [Path(name)]
    if base is not None:
        candidates.append(base / name)
    candidates.append(settings.MODELS_DIR / name)
    for path in candidates:
        if path.exists():
            return FileValidator.validate_model_file(path)
    raise ValidationError(f"Model file '{name}' not found")


def build_problem(config: SlqProblemConfig, base_dir: Optional[Path] = None) -> SlqProblem:
    """
    Numeric problem from a validated configuration

    Args:
        config: Problem configuration
        base_dir: Directory that relative model paths are resolved against first

    Returns:
        SlqProblem
    """
    model = load_model(_resolve_model_path(config.model, base_dir))
    end_effectors = tuple(config.end_effectors) if config.end_effectors is not None else None
    system = SystemDynamicsConfig(model, config.contact, end_effectors)
    nx, nu = system.state_dimension, system.input_dimension

    if config.x0 is not None:
        x0 = ArrayValidator.as_vector(config.x0, nx, "x0")
    elif model.has_floating_base and config.contact is not None:
        x0 = standing_state(system)
    else:
        x0 = np.zeros(nx)

    x_final = x0.copy() if config.x_final is None else ArrayValidator.as_vector(config.x_final, nx, "x_final")
    if config.base_displacement is not None:
        if not model.has_floating_base:
            raise ValidationError("base_displacement needs a floating-base model")
        x_final[3:6] += ArrayValidator.as_vector(config.base_displacement, 3, "base_displacement")
    x_nominal = x0.copy() if config.x_nominal is None else ArrayValidator.as_vector(config.x_nominal, nx, "x_nominal")

    n_steps = int(round(config.horizon / config.dt))
    controller = initial_controller(config.initial_controller, system, x0, n_steps, config.kp, config.kd)
    if config.u_nominal is not None:
        u_nominal = ArrayValidator.as_vector(config.u_nominal, nu, "u_nominal")
    else:
        u_nominal = controller.u_ff[0].copy()

    return SlqProblem(
        name=config.name,
        system=system,
        Q=weight_matrix(config.Q, nx, "Q"),
        R=weight_matrix(config.R, nu, "R"),
        Q_final=weight_matrix(config.Q_final, nx, "Q_final"),
        x0=x0,
        x_nominal=x_nominal,
        x_final=x_final,
        u_nominal=u_nominal,
        horizon=config.horizon,
        dt=config.dt,
        initial_controller=controller,
        options=config.solver,
    )


def load_problem_config(path: Union[str, Path]) -> SlqProblemConfig:
    path = FileValidator.validate_problem_file(path)
    try:
        return SlqProblemConfig.model_validate(json.loads(path.read_text()))
    except (PydanticValidationError, json.JSONDecodeError) as exc:
        raise ValidationError(f"Invalid problem file {path.name}: {exc}") from exc


def load_problem(path: Union[str, Path], **overrides) -> SlqProblem:
    """
    Load and build a problem file

    Args:
        path: JSON problem file
        **overrides: Top-level fields replaced before building (e.g. horizon)

    Returns:
        SlqProblem
    """
    config = load_problem_config(path)
    if overrides:
        config = SlqProblemConfig.model_validate({**config.model_dump(by_alias=True), **overrides})
    problem = build_problem(config, Path(path).resolve().parent)
    logger.info(
        f"Loaded problem '{problem.name}': {problem.n_steps} steps of {problem.dt} s, "
        f"nx={problem.nx}, nu={problem.nu}"
    )
    return problem


__all__ = [
    "InitialController",
    "SlqSolverOptions",
    "SlqProblemConfig",
    "AffineController",
    "SlqProblem",
    "weight_matrix",
    "gravity_compensation_torques",
    "standing_gains",
    "initial_controller",
    "build_problem",
    "load_problem_config",
    "load_problem",
]
