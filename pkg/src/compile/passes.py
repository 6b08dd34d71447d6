"""
Optimization passes over recorded tapes.

Each pass reads a tape and writes a fresh one, remapping operand indices as
it goes. Folding, simplification and value numbering share one node
builder; dead-code elimination is a backward liveness sweep.
"""
from typing import Dict, List, Optional

from pydantic import BaseModel

from src.autodiff.tape import BINARY_FUNCTIONS, BINARY_OPS, COMMUTATIVE_OPS, UNARY_FUNCTIONS, Op, Tape
from src.utils.logger import get_logger

logger = get_logger(__name__)


class OptimizationConfig(BaseModel):
    """Which passes run; the order is fixed"""

    fold_constants: bool = True
    simplify: bool = True
    cse: bool = True
    dce: bool = True
    allocate_registers: bool = True

    @classmethod
    def none(cls) -> "OptimizationConfig":
        """Straight translation of the tape, one register per entry"""
        return cls(fold_constants=False, simplify=False, cse=False, dce=False, allocate_registers=False)


class ExpressionBuilder:
    """
    Appends entries to a new tape, canonicalizing them on the way in

    Args:
        n_inputs: Input slots of the tape being built
        fold: Evaluate operations whose operands are all constants
        simplify: Apply x·1, x+0, x·0 style identities
        cse: Reuse an existing entry with the same opcode and operands
    """

    def __init__(self, n_inputs: int, fold: bool = True, simplify: bool = True, cse: bool = True):
        self.tape = Tape(n_inputs)
        self.fold = fold
        self.simplify = simplify
        self.cse = cse
        self._table: Dict[tuple, int] = {}

    def input(self, slot: int) -> int:
        return self.tape.add_input(slot)

    def constant(self, value: float) -> int:
        return self.tape.constant(value)

    def is_constant(self, index: int, value: Optional[float] = None) -> bool:
        if self.tape.ops[index] != Op.CONST:
            return False
        return value is None or self.tape.consts[index] == value

    def emit(self, op: int, a: int, b: int = -1) -> int:
        """Index of an entry computing ``op(a, b)``"""
        if self.fold:
            folded = self._try_fold(op, a, b)
            if folded is not None:
                return folded
        if self.simplify:
            simplified = self._try_simplify(op, a, b)
            if simplified is not None:
                return simplified
        if not self.cse:
            return self.tape.append(op, a, b)

        if op in COMMUTATIVE_OPS and b < a:
            a, b = b, a
        key = (op, a, b)
        index = self._table.get(key)
        if index is None:
            index = self.tape.append(op, a, b)
            self._table[key] = index
        return index

    def _try_fold(self, op: int, a: int, b: int) -> Optional[int]:
        consts = self.tape.consts
        try:
            if op in BINARY_OPS:
                if self.is_constant(a) and self.is_constant(b):
                    return self.constant(BINARY_FUNCTIONS[op](consts[a], consts[b]))
            elif self.is_constant(a):
                return self.constant(UNARY_FUNCTIONS[op](consts[a]))
        except (ZeroDivisionError, ValueError, OverflowError):
            # left in place so evaluation fails the same way replay does
            return None
        return None

    def _try_simplify(self, op: int, a: int, b: int) -> Optional[int]:
        is_const = self.is_constant
        if op == Op.ADD:
            if is_const(b, 0.0):
                return a
            if is_const(a, 0.0):
                return b
        elif op == Op.SUB:
            if is_const(b, 0.0):
                return a
            if is_const(a, 0.0):
                return self.emit(Op.NEG, b)
        elif op == Op.MUL:
            if is_const(b, 1.0):
                return a
            if is_const(a, 1.0):
                return b
            if is_const(a, 0.0) or is_const(b, 0.0):
                return self.constant(0.0)
            if is_const(b, -1.0):
                return self.emit(Op.NEG, a)
            if is_const(a, -1.0):
                return self.emit(Op.NEG, b)
        elif op == Op.DIV:
            if is_const(b, 1.0):
                return a
            if is_const(b, -1.0):
                return self.emit(Op.NEG, a)
        elif op == Op.NEG:
            if self.tape.ops[a] == Op.NEG:
                return self.tape.arg1[a]
        return None


def rebuild(tape: Tape, fold: bool = False, simplify: bool = False, cse: bool = False) -> Tape:
    """
    Copy a tape through an ``ExpressionBuilder``

    Args:
        tape: Source tape
        fold, simplify, cse: Builder switches

    Returns:
        New tape with the same inputs and outputs
    """
    builder = ExpressionBuilder(tape.n_inputs, fold=fold, simplify=simplify, cse=cse)
    remap: List[int] = [-1] * len(tape)
    for i, (op, a, b, c) in enumerate(zip(tape.ops, tape.arg1, tape.arg2, tape.consts)):
        if op == Op.INPUT:
            remap[i] = builder.input(a)
        elif op == Op.CONST:
            remap[i] = builder.constant(c)
        elif op in BINARY_OPS:
            remap[i] = builder.emit(op, remap[a], remap[b])
        else:
            remap[i] = builder.emit(op, remap[a])
    new = builder.tape
    new.output_indices = [remap[i] for i in tape.output_indices]
    new.branch_warning = tape.branch_warning
    new.comparison_count = tape.comparison_count
    return new


def fold_constants(tape: Tape) -> Tape:
    return rebuild(tape, fold=True)


def simplify(tape: Tape) -> Tape:
    return rebuild(tape, simplify=True)


def eliminate_common_subexpressions(tape: Tape) -> Tape:
    """Value numbering; commutative operands are put in index order first"""
    return rebuild(tape, cse=True)


def eliminate_dead_code(tape: Tape) -> Tape:
    """Drop entries no output depends on; input entries always survive"""
    live = [False] * len(tape)
    for index in tape.output_indices:
        live[index] = True
    for i in range(len(tape) - 1, -1, -1):
        op = tape.ops[i]
        if not live[i] or op <= Op.CONST:
            continue
        live[tape.arg1[i]] = True
        if op in BINARY_OPS:
            live[tape.arg2[i]] = True

    new = Tape(tape.n_inputs)
    remap: List[int] = [-1] * len(tape)
    for i, (op, a, b, c) in enumerate(zip(tape.ops, tape.arg1, tape.arg2, tape.consts)):
        if op == Op.INPUT:
            remap[i] = new.add_input(a)
        elif not live[i]:
            continue
        elif op == Op.CONST:
            remap[i] = new.constant(c)
        else:
            remap[i] = new.append(op, remap[a], remap[b] if op in BINARY_OPS else -1)
    new.output_indices = [remap[i] for i in tape.output_indices]
    new.branch_warning = tape.branch_warning
    new.comparison_count = tape.comparison_count
    return new


def optimize(tape: Tape, config: Optional[OptimizationConfig] = None) -> Tape:
    """
    Run the enabled passes in order: fold, simplify, CSE, DCE

    Args:
        tape: Recorded tape (left untouched)
        config: Pass switches; all enabled by default

    Returns:
        Optimized tape
    """
    config = config or OptimizationConfig()
    pipeline = [
        ("fold", config.fold_constants, fold_constants),
        ("simplify", config.simplify, simplify),
        ("cse", config.cse, eliminate_common_subexpressions),
        ("dce", config.dce, eliminate_dead_code),
    ]
    current = tape
    for name, enabled, run in pipeline:
        if not enabled:
            continue
        before = current.n_arithmetic
        current = run(current)
        logger.debug(f"Pass {name}: {before} -> {current.n_arithmetic} arithmetic instructions")
    return current


__all__ = [
    "OptimizationConfig",
    "ExpressionBuilder",
    "rebuild",
    "fold_constants",
    "simplify",
    "eliminate_common_subexpressions",
    "eliminate_dead_code",
    "optimize",
]
