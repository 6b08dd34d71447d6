"""
Symbolic Jacobians of tapes, compiled together with the primal values.

The derivative tape holds the primal computation followed by derivative
entries built through an ``ExpressionBuilder``. Its outputs are y followed by
J in row-major order, so one program evaluation yields both.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.autodiff.tape import BINARY_OPS, Op, Tape
from src.compile.passes import ExpressionBuilder, OptimizationConfig
from src.compile.program import StraightLineProgram, compile_function
from src.utils.errors import DimensionError
from src.utils.logger import get_logger

logger = get_logger(__name__)


class JacobianMode(str, Enum):
    FORWARD = "forward"
    REVERSE = "reverse"


def _abs_sign(tape: Tape, node: int) -> float:
    # slope of |x| is frozen at the recorded sign, like any other branch
    if tape.values and tape.values[node] < 0.0:
        return -1.0
    return 1.0


class _Differentiator:
    """Primal copy of a tape plus helpers for local partial derivatives"""

    def __init__(self, tape: Tape):
        self.source = tape
        self.builder = ExpressionBuilder(tape.n_inputs)
        self.one = self.builder.constant(1.0)
        self.zero = self.builder.constant(0.0)
        self.primal: List[int] = [-1] * len(tape)
        for i, (op, a, b, c) in enumerate(zip(tape.ops, tape.arg1, tape.arg2, tape.consts)):
            if op == Op.INPUT:
                self.primal[i] = self.builder.input(a)
            elif op == Op.CONST:
                self.primal[i] = self.builder.constant(c)
            elif op in BINARY_OPS:
                self.primal[i] = self.builder.emit(op, self.primal[a], self.primal[b])
            else:
                self.primal[i] = self.builder.emit(op, self.primal[a])
        self._partials: Dict[Tuple[int, int], int] = {}

    def emit(self, op: Op, a: int, b: int = -1) -> int:
        return self.builder.emit(op, a, b)

    def partial(self, node: int, which: int) -> int:
        """
        Builder index of d(node)/d(operand), ``which`` being 0 or 1

        Partials of ADD, SUB and NEG are ±1 and handled by the callers.
        """
        key = (node, which)
        cached = self._partials.get(key)
        if cached is not None:
            return cached

        tape = self.source
        op = tape.ops[node]
        a = self.primal[tape.arg1[node]]
        y = self.primal[node]
        emit = self.emit
        if op == Op.MUL:
            result = self.primal[tape.arg2[node]] if which == 0 else a
        elif op == Op.DIV:
            b = self.primal[tape.arg2[node]]
            if which == 0:
                result = emit(Op.DIV, self.one, b)
            else:
                result = emit(Op.NEG, emit(Op.DIV, y, b))
        elif op == Op.SIN:
            result = emit(Op.COS, a)
        elif op == Op.COS:
            result = emit(Op.NEG, emit(Op.SIN, a))
        elif op == Op.TAN:
            result = emit(Op.ADD, self.one, emit(Op.MUL, y, y))
        elif op == Op.EXP:
            result = y
        elif op == Op.LOG:
            result = emit(Op.DIV, self.one, a)
        elif op == Op.SQRT:
            result = emit(Op.DIV, self.builder.constant(0.5), y)
        elif op == Op.ABS:
            result = self.builder.constant(_abs_sign(tape, node))
        else:
            raise ValueError(f"No local partial for opcode {Op(op).name}")
        self._partials[key] = result
        return result

    def scaled(self, weight: int, node: int, which: int) -> int:
        """weight · d(node)/d(operand ``which``)"""
        op = self.source.ops[node]
        if op == Op.ADD or (op == Op.SUB and which == 0):
            return weight
        if op == Op.NEG or op == Op.SUB:
            return self.emit(Op.NEG, weight)
        return self.emit(Op.MUL, weight, self.partial(node, which))

    def accumulate(self, current: Optional[int], contribution: int) -> int:
        return contribution if current is None else self.emit(Op.ADD, current, contribution)


def _columns(tape: Tape, wrt: Optional[Sequence[int]]) -> List[int]:
    columns = list(range(tape.n_inputs)) if wrt is None else [int(c) for c in wrt]
    for column in columns:
        if not 0 <= column < tape.n_inputs:
            raise DimensionError(f"Column {column} outside the {tape.n_inputs} tape inputs")
    return columns


def _forward_entries(diff: _Differentiator, columns: List[int]) -> List[List[int]]:
    tape = diff.source
    column_of = {slot: k for k, slot in enumerate(columns)}
    tangents: List[Dict[int, int]] = [{} for _ in range(len(tape))]
    for i, op in enumerate(tape.ops):
        if op == Op.INPUT:
            k = column_of.get(tape.arg1[i])
            if k is not None:
                tangents[i] = {k: diff.one}
            continue
        if op == Op.CONST:
            continue
        tangent: Dict[int, int] = {}
        operands = (tape.arg1[i], tape.arg2[i]) if op in BINARY_OPS else (tape.arg1[i],)
        for which, operand in enumerate(operands):
            for k, dot in tangents[operand].items():
                tangent[k] = diff.accumulate(tangent.get(k), diff.scaled(dot, i, which))
        tangents[i] = tangent
    return [
        [tangents[node].get(k, diff.zero) for k in range(len(columns))]
        for node in tape.output_indices
    ]


def _reverse_entries(diff: _Differentiator, columns: List[int]) -> List[List[int]]:
    tape = diff.source
    input_node = {tape.arg1[node]: node for node in tape.input_nodes}
    rows = []
    for output in tape.output_indices:
        adjoint: Dict[int, int] = {output: diff.one}
        for i in range(output, -1, -1):
            op = tape.ops[i]
            weight = adjoint.get(i)
            if weight is None or op <= Op.CONST:
                continue
            operands = (tape.arg1[i], tape.arg2[i]) if op in BINARY_OPS else (tape.arg1[i],)
            for which, operand in enumerate(operands):
                adjoint[operand] = diff.accumulate(adjoint.get(operand), diff.scaled(weight, i, which))
        rows.append([adjoint.get(input_node[slot], diff.zero) for slot in columns])
    return rows


def jacobian_tape(
    tape: Tape,
    mode: JacobianMode = JacobianMode.REVERSE,
    wrt: Optional[Sequence[int]] = None,
) -> Tape:
    """
    Tape computing [y, J] for a recorded tape

    Args:
        tape: Recorded tape
        mode: Forward (tangent propagation) or reverse (adjoint sweeps per output)
        wrt: Input columns to differentiate against; all inputs by default

    Returns:
        Tape with n_outputs = m + m·len(wrt)
    """
    columns = _columns(tape, wrt)
    diff = _Differentiator(tape)
    if JacobianMode(mode) == JacobianMode.FORWARD:
        rows = _forward_entries(diff, columns)
    else:
        rows = _reverse_entries(diff, columns)
    result = diff.builder.tape
    result.output_indices = [diff.primal[i] for i in tape.output_indices] + [e for row in rows for e in row]
    result.branch_warning = tape.branch_warning
    result.comparison_count = tape.comparison_count
    return result


@dataclass(frozen=True)
class DerivativeFunction:
    """Compiled (y, J) evaluator"""

    program: StraightLineProgram
    n_in: int
    n_out: int
    columns: Tuple[int, ...]
    mode: JacobianMode

    @property
    def n_columns(self) -> int:
        return len(self.columns)

    def _split(self, values) -> Tuple[np.ndarray, np.ndarray]:
        values = np.asarray(values, dtype=float)
        y = values[:self.n_out]
        J = values[self.n_out:].reshape(self.n_out, self.n_columns)
        return y, J

    def evaluate(self, x: Sequence[float], workspace: Optional[List[float]] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Interpreted evaluation on a caller-owned register file"""
        return self._split(self.program.evaluate(x, workspace))

    def __call__(self, x: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        """
        Args:
            x: Evaluation point (n_in)

        Returns:
            (y, J) with J of shape n_out × len(columns)
        """
        return self._split(self.program(x))


def compile_jacobian(
    tape: Tape,
    mode: JacobianMode = JacobianMode.REVERSE,
    wrt: Optional[Sequence[int]] = None,
    passes: Optional[OptimizationConfig] = None,
    name: str = "jacobian",
) -> DerivativeFunction:
    """
    Compile a tape's Jacobian, fused with its primal outputs

    Args:
        tape: Recorded tape
        mode: Differentiation mode
        wrt: Optional subset of input columns
        passes: Pass switches for the derivative program
        name: Program name

    Returns:
        DerivativeFunction
    """
    mode = JacobianMode(mode)
    columns = _columns(tape, wrt)
    derivative_tape = jacobian_tape(tape, mode, columns)
    logger.debug(
        f"Derivative tape '{name}' ({mode.value}): {derivative_tape.n_arithmetic} instructions "
        f"for {tape.n_outputs}x{len(columns)} entries"
    )
    program = compile_function(derivative_tape, passes, name=name)
    return DerivativeFunction(
        program=program,
        n_in=tape.n_inputs,
        n_out=tape.n_outputs,
        columns=tuple(columns),
        mode=mode,
    )


__all__ = ["JacobianMode", "DerivativeFunction", "jacobian_tape", "compile_jacobian"]
