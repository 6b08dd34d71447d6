"""
Recording tape for reverse-mode differentiation and compilation.

A ``Tape`` is a single-static-assignment list of scalar operations. Each
entry has an opcode, up to two operand indices into earlier entries, and a
constant payload (the value for ``CONST``, unused otherwise). ``INPUT``
entries store their input slot in the first operand field.
"""
import math
from enum import IntEnum
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from src.autodiff import scalar
from src.autodiff.scalar import REAL_TYPES, primal_value
from src.utils.errors import DimensionError, RecordError
from src.utils.logger import get_logger

logger = get_logger(__name__)


class Op(IntEnum):
    """Tape opcodes"""

    INPUT = 0
    CONST = 1
    ADD = 2
    SUB = 3
    MUL = 4
    DIV = 5
    NEG = 6
    SIN = 7
    COS = 8
    TAN = 9
    EXP = 10
    LOG = 11
    SQRT = 12
    ABS = 13


BINARY_OPS = frozenset({Op.ADD, Op.SUB, Op.MUL, Op.DIV})
UNARY_OPS = frozenset({Op.NEG, Op.SIN, Op.COS, Op.TAN, Op.EXP, Op.LOG, Op.SQRT, Op.ABS})
COMMUTATIVE_OPS = frozenset({Op.ADD, Op.MUL})

# Float semantics of every arithmetic opcode, shared by replay, folding and the interpreter
UNARY_FUNCTIONS: Dict[int, Callable[[float], float]] = {
    Op.NEG: lambda a: -a,
    Op.SIN: math.sin,
    Op.COS: math.cos,
    Op.TAN: math.tan,
    Op.EXP: math.exp,
    Op.LOG: math.log,
    Op.SQRT: math.sqrt,
    Op.ABS: math.fabs,
}

BINARY_FUNCTIONS: Dict[int, Callable[[float, float], float]] = {
    Op.ADD: lambda a, b: a + b,
    Op.SUB: lambda a, b: a - b,
    Op.MUL: lambda a, b: a * b,
    Op.DIV: lambda a, b: a / b,
}


def apply_op(op: int, a, b=None):
    """Evaluate one opcode on any scalar backend"""
    if op == Op.ADD:
        return a + b
    if op == Op.SUB:
        return a - b
    if op == Op.MUL:
        return a * b
    if op == Op.DIV:
        return a / b
    if op == Op.NEG:
        return -a
    if op == Op.SIN:
        return scalar.sin(a)
    if op == Op.COS:
        return scalar.cos(a)
    if op == Op.TAN:
        return scalar.tan(a)
    if op == Op.EXP:
        return scalar.exp(a)
    if op == Op.LOG:
        return scalar.log(a)
    if op == Op.SQRT:
        return scalar.sqrt(a)
    if op == Op.ABS:
        return scalar.fabs(a)
    raise ValueError(f"Not an arithmetic opcode: {op}")


class Instruction(NamedTuple):
    """Read-only view of one tape entry"""

    opcode: Op
    a: int
    b: int
    const: float


class Tape:
    """Recorded expression graph"""

    def __init__(self, n_inputs: int = 0):
        self.n_inputs = n_inputs
        self.ops: List[int] = []
        self.arg1: List[int] = []
        self.arg2: List[int] = []
        self.consts: List[float] = []
        # Primal values seen while recording; empty for synthesized tapes
        self.values: List[float] = []
        self.input_nodes: List[int] = []
        self.output_indices: List[int] = []
        self.recording = False
        self.branch_warning = False
        self.comparison_count = 0
        self._const_nodes: Dict[tuple, int] = {}

    def __len__(self) -> int:
        return len(self.ops)

    @property
    def n_outputs(self) -> int:
        return len(self.output_indices)

    @property
    def n_arithmetic(self) -> int:
        """Number of arithmetic instructions (inputs and constants excluded)"""
        return sum(1 for op in self.ops if op > Op.CONST)

    @property
    def instructions(self) -> List[Instruction]:
        return [
            Instruction(Op(op), a, b, c)
            for op, a, b, c in zip(self.ops, self.arg1, self.arg2, self.consts)
        ]

    def append(self, op: int, a: int = -1, b: int = -1, const: float = 0.0) -> int:
        """Append an entry without tracking primal values"""
        self.ops.append(int(op))
        self.arg1.append(a)
        self.arg2.append(b)
        self.consts.append(const)
        return len(self.ops) - 1

    def add_input(self, slot: int) -> int:
        index = self.append(Op.INPUT, slot)
        self.input_nodes.append(index)
        return index

    def constant(self, value: float) -> int:
        """Index of a deduplicated constant entry"""
        value = float(value)
        # -0.0 and 0.0 stay distinct
        key = (value, math.copysign(1.0, value)) if value == value else ("nan",)
        index = self._const_nodes.get(key)
        if index is None:
            index = self.append(Op.CONST, const=value)
            self._const_nodes[key] = index
            if self.recording:
                self.values.append(value)
        return index

    def push(self, op: int, a: int, b: int, value: float) -> int:
        """Append an arithmetic entry during recording"""
        if not self.recording:
            raise RecordError("Tape is no longer recording")
        index = self.append(op, a, b)
        self.values.append(value)
        return index

    def note_comparison(self):
        self.comparison_count += 1
        self.branch_warning = True

    def replay(self, x: Sequence) -> list:
        """
        Re-execute the tape on any scalar backend

        Args:
            x: Input values (floats, dual numbers, ...)

        Returns:
            Output values in ``output_indices`` order
        """
        if len(x) != self.n_inputs:
            raise DimensionError(f"Tape expects {self.n_inputs} inputs, got {len(x)}")
        if isinstance(x, np.ndarray):
            x = x.tolist()

        vals: list = [None] * len(self.ops)
        arg1 = self.arg1
        arg2 = self.arg2
        consts = self.consts
        for i, op in enumerate(self.ops):
            if op == Op.INPUT:
                vals[i] = x[arg1[i]]
            elif op == Op.CONST:
                vals[i] = consts[i]
            elif op == Op.MUL:
                vals[i] = vals[arg1[i]] * vals[arg2[i]]
            elif op == Op.ADD:
                vals[i] = vals[arg1[i]] + vals[arg2[i]]
            elif op == Op.SUB:
                vals[i] = vals[arg1[i]] - vals[arg2[i]]
            elif op == Op.DIV:
                vals[i] = vals[arg1[i]] / vals[arg2[i]]
            elif op == Op.NEG:
                vals[i] = -vals[arg1[i]]
            else:
                vals[i] = apply_op(op, vals[arg1[i]])
        return [vals[i] for i in self.output_indices]

    def replay_all(self, x: Sequence[float]) -> List[float]:
        """Float replay keeping every intermediate value"""
        if len(x) != self.n_inputs:
            raise DimensionError(f"Tape expects {self.n_inputs} inputs, got {len(x)}")

        vals = [0.0] * len(self.ops)
        arg1 = self.arg1
        arg2 = self.arg2
        consts = self.consts
        unary = UNARY_FUNCTIONS
        for i, op in enumerate(self.ops):
            if op == Op.MUL:
                vals[i] = vals[arg1[i]] * vals[arg2[i]]
            elif op == Op.ADD:
                vals[i] = vals[arg1[i]] + vals[arg2[i]]
            elif op == Op.SUB:
                vals[i] = vals[arg1[i]] - vals[arg2[i]]
            elif op == Op.DIV:
                vals[i] = vals[arg1[i]] / vals[arg2[i]]
            elif op == Op.CONST:
                vals[i] = consts[i]
            elif op == Op.INPUT:
                vals[i] = float(x[arg1[i]])
            else:
                vals[i] = unary[op](vals[arg1[i]])
        return vals

    def __repr__(self) -> str:
        return (
            f"Tape(n_inputs={self.n_inputs}, n_outputs={self.n_outputs}, "
            f"instructions={len(self)}, arithmetic={self.n_arithmetic})"
        )


class TapeVariable:
    """Scalar that appends every operation applied to it onto its tape"""

    __slots__ = ("tape", "index")

    def __init__(self, tape: Tape, index: int):
        self.tape = tape
        self.index = index

    @property
    def value(self) -> float:
        return self.tape.values[self.index]

    def _operand(self, other):
        if isinstance(other, TapeVariable):
            if other.tape is not self.tape:
                raise RecordError("Operands belong to different tapes")
            return other.index, other.value
        if isinstance(other, REAL_TYPES):
            other = float(other)
            return self.tape.constant(other), other
        return None, None

    def _binary(self, op: Op, other, reflected: bool = False):
        index, other_value = self._operand(other)
        if index is None:
            return NotImplemented
        fn = BINARY_FUNCTIONS[op]
        if reflected:
            value = fn(other_value, self.value)
            return TapeVariable(self.tape, self.tape.push(op, index, self.index, value))
        value = fn(self.value, other_value)
        return TapeVariable(self.tape, self.tape.push(op, self.index, index, value))

    def _unary(self, op: Op):
        value = UNARY_FUNCTIONS[op](self.value)
        return TapeVariable(self.tape, self.tape.push(op, self.index, -1, value))

    def __add__(self, other):
        return self._binary(Op.ADD, other)

    def __radd__(self, other):
        return self._binary(Op.ADD, other, reflected=True)

    def __sub__(self, other):
        return self._binary(Op.SUB, other)

    def __rsub__(self, other):
        return self._binary(Op.SUB, other, reflected=True)

    def __mul__(self, other):
        return self._binary(Op.MUL, other)

    def __rmul__(self, other):
        return self._binary(Op.MUL, other, reflected=True)

    def __truediv__(self, other):
        return self._binary(Op.DIV, other)

    def __rtruediv__(self, other):
        return self._binary(Op.DIV, other, reflected=True)

    def __neg__(self):
        return self._unary(Op.NEG)

    def __pos__(self):
        return self

    def __pow__(self, exponent):
        if isinstance(exponent, int) and exponent >= 0:
            result = 1.0
            for _ in range(exponent):
                result = self * result
            return result
        return (self.log() * exponent).exp()

    def __abs__(self):
        return self._unary(Op.ABS)

    def sin(self):
        return self._unary(Op.SIN)

    def cos(self):
        return self._unary(Op.COS)

    def tan(self):
        return self._unary(Op.TAN)

    def exp(self):
        return self._unary(Op.EXP)

    def log(self):
        return self._unary(Op.LOG)

    def sqrt(self):
        return self._unary(Op.SQRT)

    def fabs(self):
        return self._unary(Op.ABS)

    # Comparisons use the recorded value and flag the tape
    def _compare(self, other) -> tuple:
        self.tape.note_comparison()
        return self.value, primal_value(other)

    def __lt__(self, other):
        a, b = self._compare(other)
        return a < b

    def __le__(self, other):
        a, b = self._compare(other)
        return a <= b

    def __gt__(self, other):
        a, b = self._compare(other)
        return a > b

    def __ge__(self, other):
        a, b = self._compare(other)
        return a >= b

    def __eq__(self, other):
        a, b = self._compare(other)
        return a == b

    def __ne__(self, other):
        a, b = self._compare(other)
        return a != b

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return f"TapeVariable(index={self.index}, value={self.value!r})"


def record(f: Callable[[List[TapeVariable]], object], n_inputs: int, probe_point: Sequence[float]) -> Tape:
    """
    Record ``f`` at ``probe_point`` into a new tape

    Control flow is frozen at the branch taken for the probe point. A
    primal comparison during recording sets ``tape.branch_warning``.

    Args:
        f: Function of a list of scalars returning a scalar or a sequence of scalars
        n_inputs: Number of inputs f takes
        probe_point: Input values used while recording

    Returns:
        Finished (no longer recording) tape
    """
    probe = np.asarray(probe_point, dtype=float).ravel()
    if probe.size != n_inputs:
        raise DimensionError(f"Probe point has size {probe.size}, expected {n_inputs}")

    tape = Tape(n_inputs)
    tape.recording = True
    variables = []
    for slot, value in enumerate(probe.tolist()):
        index = tape.add_input(slot)
        tape.values.append(value)
        variables.append(TapeVariable(tape, index))

    try:
        result = f(variables)
    except Exception as exc:
        tape.recording = False
        raise RecordError(f"Recorded function raised {type(exc).__name__}: {exc}") from exc

    outputs = result if isinstance(result, (list, tuple, np.ndarray)) else [result]
    for out in outputs:
        if isinstance(out, TapeVariable) and out.tape is tape:
            tape.output_indices.append(out.index)
        elif isinstance(out, REAL_TYPES):
            tape.output_indices.append(tape.constant(float(out)))
        else:
            tape.recording = False
            raise RecordError(f"Output of type {type(out).__name__} is not a value of this tape")

    tape.recording = False
    if tape.branch_warning:
        logger.warning(
            f"Recording used {tape.comparison_count} primal comparisons; "
            "the tape is only valid for the branch taken at the probe point"
        )
    logger.debug(f"Recorded {tape!r}")
    return tape


__all__ = [
    "Op",
    "Instruction",
    "Tape",
    "TapeVariable",
    "record",
    "apply_op",
    "BINARY_OPS",
    "UNARY_OPS",
    "COMMUTATIVE_OPS",
    "UNARY_FUNCTIONS",
    "BINARY_FUNCTIONS",
]
