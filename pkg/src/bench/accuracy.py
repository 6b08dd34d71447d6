"""
Accuracy suite: derivative matrices of every provider compared against
each other and, for the single-link pendulum, against closed forms.
"""
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from config.settings import settings
from src.bench.schemas import AccuracyRow, rows_to_frame
from src.deriv.dynamics_derivatives import fd_torque_block
from src.deriv.engine import Provider, get_engine
from src.deriv.functions import FunctionKind
from src.deriv.numdiff import DifferenceScheme
from src.dynamics.state import random_configuration
from src.model.parser import load_model
from src.model.robot_model import JointType, RobotModel
from src.utils.logger import get_logger
from src.utils.validators import FileValidator

logger = get_logger(__name__)

EXACT_TOLERANCE = 1e-12
NUMDIFF_BAND = (1e-9, 1e-3)
CLOSED_FORM_TOLERANCE = 1e-10

JacobianFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Comparison:
    """One (function, provider pair) cell of the suite"""

    function: str
    provider_a: str
    provider_b: str
    a: JacobianFn
    b: JacobianFn
    points: Sequence[np.ndarray]
    upper: float
    lower: float = 0.0
    metric: str = "max_abs"

    def run(self) -> AccuracyRow:
        max_abs = 0.0
        max_rel = 0.0
        frobenius = 0.0
        for x in self.points:
            Ja = np.asarray(self.a(x), dtype=float)
            Jb = np.asarray(self.b(x), dtype=float)
            diff = Ja - Jb
            worst = float(np.max(np.abs(diff))) if diff.size else 0.0
            max_abs = max(max_abs, worst)
            max_rel = max(max_rel, worst / max(1.0, float(np.max(np.abs(Jb)))))
            frobenius = max(frobenius, float(np.linalg.norm(diff)))

        bounded = {"max_abs": max_abs, "max_rel": max_rel, "frobenius": frobenius}[self.metric]
        passed = self.lower <= bounded < self.upper
        row = AccuracyRow(
            function=self.function,
            provider_a=self.provider_a,
            provider_b=self.provider_b,
            metric=self.metric,
            max_abs_diff=max_abs,
            frobenius_diff=frobenius,
            lower_bound=self.lower,
            upper_bound=self.upper,
            n_states=len(self.points),
            passed=passed,
        )
        log = logger.info if passed else logger.error
        log(f"{self.function}: {self.provider_a} vs {self.provider_b} {self.metric}={bounded:.3e} "
            f"in [{self.lower:.0e}, {self.upper:.0e}) -> {'ok' if passed else 'BREACH'}")
        return row


@dataclass
class AccuracyReport:
    model: str
    seed: int
    rows: List[AccuracyRow] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def failures(self) -> List[AccuracyRow]:
        return [row for row in self.rows if not row.passed]

    def to_frame(self) -> pd.DataFrame:
        return rows_to_frame(self.rows, AccuracyRow)

    def write_csv(self, directory: Union[str, Path]) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / "accuracy.csv"
        self.to_frame().to_csv(path, index=False, float_format="%.6e")
        logger.info(f"Accuracy report written to {path}")
        return path


def sample_states(model: RobotModel, n_states: int, rng: np.random.Generator) -> List[np.ndarray]:
    """
    Random [q, qd, w] points, w being τ_a for forward dynamics or qdd for
    inverse dynamics (the leading nu entries)
    """
    points = []
    for _ in range(n_states):
        q = random_configuration(model, rng)
        qd = rng.uniform(-1.0, 1.0, size=model.nv)
        w = rng.uniform(-1.0, 1.0, size=model.nv)
        points.append(np.concatenate([q, qd, w]))
    return points


def _engine_jacobian(model: RobotModel, kind: FunctionKind, provider: Provider, **kwargs) -> JacobianFn:
    engine = get_engine(model, kind)

    def jacobian(x: np.ndarray) -> np.ndarray:
        return engine.jacobian(x[:engine.n_in], provider, **kwargs)[1]

    return jacobian


def _fd_point(model: RobotModel, x: np.ndarray) -> np.ndarray:
    return x[:model.nq + model.nv + model.nu]


def _torque_block(model: RobotModel, provider: Provider, method: str = "ltl") -> JacobianFn:
    nq, nv, nu = model.nq, model.nv, model.nu

    def block(x: np.ndarray) -> np.ndarray:
        return fd_torque_block(model, x[:nq], x[nq:nq + nv], x[nq + nv:nq + nv + nu], provider, method=method)

    return block


def _fd_inputs(model: RobotModel, points: Sequence[np.ndarray]) -> List[np.ndarray]:
    return [_fd_point(model, x) for x in points]


# Closed forms for a single revolute link about z with the joint frame at the world origin

def is_planar_pendulum(model: RobotModel) -> bool:
    if model.n_links != 1:
        return False
    joint = model.links[0].joint
    return (
        joint.kind == JointType.REVOLUTE
        and tuple(joint.axis) == (0.0, 0.0, 1.0)
        and not any(joint.xyz)
        and not any(joint.rpy)
    )


def _pendulum_terms(model: RobotModel, q: float):
    inertia = model.links[0].inertia
    m = inertia.mass
    cx, cy, _ = inertia.com
    I_O = inertia.rotational_inertia[2][2] + m * (cx * cx + cy * cy)
    c, s = math.cos(q), math.sin(q)
    com = (c * cx - s * cy, s * cx + c * cy)
    gx, gy, _ = model.gravity
    # ∂τ/∂q of inverse dynamics
    dtau_dq = m * (com[0] * gx + com[1] * gy)
    return I_O, dtau_dq


def pendulum_fd_jacobian(model: RobotModel, x: np.ndarray) -> np.ndarray:
    """∂qdd/∂[q, qd, τ]"""
    I_O, dtau_dq = _pendulum_terms(model, x[0])
    return np.array([[-dtau_dq / I_O, 0.0, 1.0 / I_O]])


def pendulum_id_jacobian(model: RobotModel, x: np.ndarray) -> np.ndarray:
    """∂τ/∂[q, qd, qdd]"""
    I_O, dtau_dq = _pendulum_terms(model, x[0])
    return np.array([[dtau_dq, 0.0, I_O]])


def pendulum_kinematics_jacobian(model: RobotModel, x: np.ndarray) -> np.ndarray:
    """∂[p, ṗ]/∂[q, qd] for every end-effector"""
    q, qd = x[0], x[1]
    c, s = math.cos(q), math.sin(q)
    blocks = []
    for ee in model.end_effectors:
        ox, oy, _ = ee.xyz
        px, py = c * ox - s * oy, s * ox + c * oy
        dp = np.array([[-py, 0.0], [px, 0.0], [0.0, 0.0]])
        dv = np.array([[-px * qd, -py], [-py * qd, px], [0.0, 0.0]])
        blocks.append((dp, dv))
    return np.vstack([dp for dp, _ in blocks] + [dv for _, dv in blocks])


def _pendulum_comparisons(model: RobotModel, points: Sequence[np.ndarray]) -> List[Comparison]:
    fd_points = [x[:3] for x in points]
    kin_points = [x[:2] for x in points]
    cases = [
        ("fd", FunctionKind.FORWARD_DYNAMICS, pendulum_fd_jacobian, fd_points),
        ("id", FunctionKind.INVERSE_DYNAMICS, pendulum_id_jacobian, fd_points),
    ]
    if model.end_effectors:
        cases.append(("kinematics", FunctionKind.KINEMATICS, pendulum_kinematics_jacobian, kin_points))

    comparisons = []
    for name, kind, closed_form, pts in cases:
        reference = lambda x, f=closed_form: f(model, x)  # noqa: E731
        for provider in (Provider.FORWARD_AD, Provider.REVERSE_AD, Provider.COMPILED_AD):
            comparisons.append(Comparison(
                name, provider.value, "closed_form", _engine_jacobian(model, kind, provider),
                reference, pts, CLOSED_FORM_TOLERANCE,
            ))
        comparisons.append(Comparison(
            name, "numdiff_five_point", "closed_form",
            _engine_jacobian(model, kind, Provider.NUMDIFF, scheme=DifferenceScheme.FIVE_POINT),
            reference, pts, CLOSED_FORM_TOLERANCE,
        ))

    torque = lambda x: pendulum_fd_jacobian(model, x)[:, 2:]  # noqa: E731
    for method in ("dense", "ltl"):
        comparisons.append(Comparison(
            "fd_tau", f"analytic_{method}", "closed_form", _torque_block(model, Provider.ANALYTIC, method),
            torque, fd_points, CLOSED_FORM_TOLERANCE,
        ))
    return comparisons


def build_comparisons(
    model: RobotModel,
    points: Sequence[np.ndarray],
    cross_check_states: int = 10,
) -> List[Comparison]:
    """
    Every comparison cell for one model

    Args:
        model: Robot model
        points: Seeded [q, qd, w] states
        cross_check_states: States used for the AD-vs-AD cross checks

    Returns:
        Comparisons in report order
    """
    fd_points = _fd_inputs(model, points)
    comparisons = []

    if model.nu:
        compiled_tau = _torque_block(model, Provider.COMPILED_AD)
        for method in ("dense", "ltl"):
            comparisons.append(Comparison(
                "fd_tau", "compiled_ad", f"analytic_{method}", compiled_tau,
                _torque_block(model, Provider.ANALYTIC, method), fd_points, EXACT_TOLERANCE, metric="frobenius",
            ))

    kinds = [("fd", FunctionKind.FORWARD_DYNAMICS), ("id", FunctionKind.INVERSE_DYNAMICS)]
    if model.end_effectors:
        kinds.append(("kinematics", FunctionKind.KINEMATICS))

    for name, kind in kinds:
        compiled = _engine_jacobian(model, kind, Provider.COMPILED_AD)
        lower, upper = NUMDIFF_BAND
        comparisons.append(Comparison(
            name, "numdiff", "compiled_ad", _engine_jacobian(model, kind, Provider.NUMDIFF),
            compiled, points, upper, lower=lower,
        ))
        subset = points[:cross_check_states]
        for provider in (Provider.FORWARD_AD, Provider.REVERSE_AD):
            comparisons.append(Comparison(
                name, provider.value, "compiled_ad", _engine_jacobian(model, kind, provider),
                compiled, subset, EXACT_TOLERANCE, metric="max_rel",
            ))

    if is_planar_pendulum(model):
        comparisons.extend(_pendulum_comparisons(model, points))
    return comparisons


def run_accuracy_suite(
    model_path: Union[str, Path],
    seed: Optional[int] = None,
    n_states: int = 100,
    threads: int = 1,
    cross_check_states: int = 10,
) -> AccuracyReport:
    """
    Compare derivative providers on seeded random states

    Args:
        model_path: Robot model file
        seed: RNG seed (RANDOM_SEED by default)
        n_states: Number of random states
        threads: Worker threads for independent comparison cells
        cross_check_states: States used for the forward/reverse AD cross checks

    Returns:
        AccuracyReport; ``passed`` is False on any tolerance breach
    """
    seed = settings.RANDOM_SEED if seed is None else seed
    model = load_model(FileValidator.validate_model_file(model_path))
    logger.info(f"Accuracy suite on '{model.name}' with {n_states} states, seed {seed}")

    start = time.perf_counter()
    points = sample_states(model, n_states, np.random.default_rng(seed))
    comparisons = build_comparisons(model, points, cross_check_states)

    # Record and compile once before fanning out
    kinds = [FunctionKind.FORWARD_DYNAMICS, FunctionKind.INVERSE_DYNAMICS]
    if model.end_effectors:
        kinds.append(FunctionKind.KINEMATICS)
    for kind in kinds:
        get_engine(model, kind).compiled()

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            rows = list(executor.map(Comparison.run, comparisons))
    else:
        rows = [comparison.run() for comparison in comparisons]

    report = AccuracyReport(model.name, seed, rows, time.perf_counter() - start)
    logger.info(f"Accuracy suite finished in {report.seconds:.2f}s: "
                f"{len(rows) - len(report.failures)}/{len(rows)} cells passed")
    return report


__all__ = [
    "AccuracyReport",
    "Comparison",
    "EXACT_TOLERANCE",
    "NUMDIFF_BAND",
    "CLOSED_FORM_TOLERANCE",
    "sample_states",
    "build_comparisons",
    "run_accuracy_suite",
    "is_planar_pendulum",
    "pendulum_fd_jacobian",
    "pendulum_id_jacobian",
    "pendulum_kinematics_jacobian",
]
