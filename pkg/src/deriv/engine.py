"""
Derivative providers and the per-function engine that serves them.

An engine records its function once, at a random non-singular point drawn
from ``RANDOM_SEED``, and compiles derivative programs on first use. Engines
are cached per (model, function kind, contact configuration).
"""
import hashlib
import threading
from enum import Enum
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from config.settings import settings
from src.autodiff.jacobian import forward_jacobian, reverse_jacobian
from src.autodiff.serialization import load_tape, save_tape
from src.autodiff.tape import Tape, record
from src.compile.derivatives import DerivativeFunction, JacobianMode, compile_jacobian
from src.contact.model import SystemDynamicsConfig
from src.deriv.functions import FlatFunction, FunctionKind, build_function, sample_point
from src.deriv.numdiff import DifferenceScheme, num_diff_jacobian
from src.model.parser import format_model
from src.model.robot_model import RobotModel
from src.utils.errors import DimensionError, ValidationError
from src.utils.logger import get_logger

logger = get_logger(__name__)


class Provider(str, Enum):
    NUMDIFF = "numdiff"
    FORWARD_AD = "forward_ad"
    REVERSE_AD = "reverse_ad"
    COMPILED_AD = "compiled_ad"
    ANALYTIC = "analytic"


# forward mode for forward maps, reverse mode for inverse dynamics
DEFAULT_MODES: Dict[FunctionKind, JacobianMode] = {
    FunctionKind.FORWARD_DYNAMICS: JacobianMode.FORWARD,
    FunctionKind.INVERSE_DYNAMICS: JacobianMode.REVERSE,
    FunctionKind.FLOATING_BASE_ID: JacobianMode.REVERSE,
    FunctionKind.KINEMATICS: JacobianMode.FORWARD,
    FunctionKind.SYSTEM_DYNAMICS: JacobianMode.FORWARD,
}


def _analytic_unavailable():
    return ValueError("Analytic derivatives exist only for the forward-dynamics torque block")


def generic_jacobian(
    f: Callable[[list], list],
    x: Sequence[float],
    provider: Provider,
    name: str = "f",
) -> Tuple[np.ndarray, np.ndarray]:
    """
    (f(x), ∂f/∂x) for an ad hoc scalar-generic function, without caching

    Args:
        f: Function of a list of scalars
        x: Evaluation point
        provider: Any provider except ANALYTIC
        name: Program name for the compiled provider

    Returns:
        (y, J)
    """
    provider = Provider(provider)
    x = np.asarray(x, dtype=float).ravel()
    if provider == Provider.NUMDIFF:
        y = np.asarray(f(x.tolist()), dtype=float)
        return y, num_diff_jacobian(lambda p: f(p.tolist()), x, DifferenceScheme.CENTRAL)
    if provider == Provider.FORWARD_AD:
        return forward_jacobian(f, x)
    if provider == Provider.ANALYTIC:
        raise _analytic_unavailable()
    tape = record(f, x.size, x)
    if provider == Provider.REVERSE_AD:
        return reverse_jacobian(tape, x)
    return compile_jacobian(tape, JacobianMode.FORWARD, name=name)(x)


class JacobianEngine:
    """
    Values and Jacobians of one flat function through every provider

    Args:
        model: Robot model the function is built on
        function: Flat function
        parameter_link: Link whose inertial parameters are inputs, if any
        use_disk_cache: Load/store the recorded tape under TAPE_CACHE_DIR
    """

    def __init__(
        self,
        model: RobotModel,
        function: FlatFunction,
        kind: FunctionKind,
        cache_key: str,
        parameter_link: Optional[int] = None,
        use_disk_cache: bool = False,
    ):
        self.model = model
        self.function = function
        self.kind = kind
        self.cache_key = cache_key
        self.parameter_link = parameter_link
        self.use_disk_cache = use_disk_cache
        self._compiled: Dict[tuple, DerivativeFunction] = {}
        self._tape: Optional[Tape] = None
        self._lock = threading.Lock()
        self._tape_lock = threading.Lock()

    @property
    def n_in(self) -> int:
        return self.function.n_in

    @property
    def n_out(self) -> int:
        return self.function.n_out

    @property
    def default_mode(self) -> JacobianMode:
        return DEFAULT_MODES[self.kind]

    @cached_property
    def probe_point(self) -> np.ndarray:
        rng = np.random.default_rng(settings.RANDOM_SEED)
        return sample_point(self.model, self.function, rng, self.parameter_link)

    @property
    def cache_path(self) -> Path:
        return settings.TAPE_CACHE_DIR / f"{self.model.name}-{self.function.name}-{self.cache_key[:16]}.rbdt"

    @property
    def tape(self) -> Tape:
        """Recorded tape, built by the first caller; concurrent callers wait for it"""
        if self._tape is None:
            with self._tape_lock:
                if self._tape is None:
                    self._tape = self._load_or_record()
        return self._tape

    def prepare(self, provider: Provider = Provider.COMPILED_AD, mode: Optional[JacobianMode] = None):
        """Build whatever the provider reads, so later evaluations only read"""
        provider = Provider(provider)
        if provider == Provider.COMPILED_AD:
            self.compiled(mode)
        elif provider == Provider.REVERSE_AD:
            _ = self.tape
        return self

    def _load_or_record(self) -> Tape:
        path = self.cache_path
        if self.use_disk_cache and path.exists():
            try:
                tape = load_tape(path)
                if tape.n_inputs == self.n_in and tape.n_outputs == self.n_out:
                    return tape
                logger.warning(f"Ignoring cached tape {path.name} with mismatched dimensions")
            except ValidationError as exc:
                logger.warning(f"Ignoring unreadable cached tape {path.name}: {exc}")

        tape = record(self.function, self.n_in, self.probe_point)
        logger.info(f"Recorded {self.function.name} for '{self.model.name}': {tape!r}")
        if self.use_disk_cache:
            save_tape(tape, path)
        return tape

    def value(self, x: Sequence[float]) -> np.ndarray:
        return np.asarray(self.function(self._check(x)), dtype=float)

    def compiled(self, mode: Optional[JacobianMode] = None, wrt: Optional[Sequence[int]] = None) -> DerivativeFunction:
        """Compiled (y, J) program, built once per (mode, columns)"""
        mode = JacobianMode(mode or self.default_mode)
        key = (mode, None if wrt is None else tuple(int(c) for c in wrt))
        program = self._compiled.get(key)
        if program is None:
            with self._lock:
                program = self._compiled.get(key)
                if program is None:
                    name = f"{self.function.name}_{mode.value}"
                    program = compile_jacobian(self.tape, mode, wrt, name=name)
                    self._compiled[key] = program
        return program

    def _check(self, x: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.n_in:
            raise DimensionError(f"{self.function.name} expects {self.n_in} inputs, got {x.size}")
        return x

    def jacobian(
        self,
        x: Sequence[float],
        provider: Provider = Provider.COMPILED_AD,
        wrt: Optional[Sequence[int]] = None,
        mode: Optional[JacobianMode] = None,
        scheme: DifferenceScheme = DifferenceScheme.SINGLE_SIDED,
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Value and Jacobian at x

        Args:
            x: Evaluation point (n_in)
            provider: Derivative provider
            wrt: Optional input columns; all by default
            mode: Compiled-program mode override
            scheme: Difference scheme for NUMDIFF

        Returns:
            (y, J) with J of shape n_out × len(wrt)
        """
        provider = Provider(provider)
        x = self._check(x)
        columns = list(range(self.n_in)) if wrt is None else [int(c) for c in wrt]

        if provider == Provider.COMPILED_AD:
            return self.compiled(mode, wrt)(x)
        if provider == Provider.NUMDIFF:
            f0 = self.value(x)
            if wrt is None:
                return f0, num_diff_jacobian(self.function, x, scheme, f0=f0)

            def restricted(sub: np.ndarray) -> list:
                full = x.copy()
                full[columns] = sub
                return self.function(full)

            return f0, num_diff_jacobian(restricted, x[columns], scheme, f0=f0)
        if provider == Provider.FORWARD_AD:
            seeds = None if wrt is None else np.eye(self.n_in)[columns]
            return forward_jacobian(self.function, x, seeds=seeds)
        if provider == Provider.REVERSE_AD:
            y, J = reverse_jacobian(self.tape, x)
            return y, J[:, columns]
        raise _analytic_unavailable()


def _cache_key(model: RobotModel, kind: FunctionKind, contact: Optional[SystemDynamicsConfig], link) -> str:
    digest = hashlib.sha1()
    digest.update(format_model(model).encode())
    digest.update(kind.value.encode())
    if contact is not None:
        params = contact.contact.model_dump_json() if contact.contact is not None else "none"
        digest.update(params.encode())
        digest.update(",".join(contact.end_effectors).encode())
    digest.update(repr(link).encode())
    return digest.hexdigest()


@lru_cache(maxsize=None)
def get_engine(
    model: RobotModel,
    kind: FunctionKind,
    contact: Optional[SystemDynamicsConfig] = None,
    parameter_link: Optional[int] = None,
    use_disk_cache: bool = False,
) -> JacobianEngine:
    """
    Shared engine for a (model, function, contact) triple

    Args:
        model: Robot model
        kind: Function kind
        contact: Optional contact configuration
        parameter_link: Lift this link's inertial parameters into the inputs (``id`` only)
        use_disk_cache: Persist the recorded tape

    Returns:
        JacobianEngine
    """
    kind = FunctionKind(kind)
    function = build_function(model, kind, contact, parameter_link)
    key = _cache_key(model, kind, contact, parameter_link)
    return JacobianEngine(model, function, kind, key, parameter_link, use_disk_cache)


__all__ = ["Provider", "DEFAULT_MODES", "JacobianEngine", "get_engine", "generic_jacobian"]
