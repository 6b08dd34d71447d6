"""
Straight-line programs over a flat register file, and the compiler that
produces them from tapes.

Register layout: inputs occupy registers [0, n_inputs), constants come next
and stay pinned, temporaries follow. With allocation enabled, temporaries are
recycled by a linear scan once their last reader has executed.
"""
import heapq
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.autodiff.tape import BINARY_OPS, UNARY_FUNCTIONS, Op, Tape
from src.compile.passes import OptimizationConfig, optimize
from src.utils.errors import DimensionError
from src.utils.logger import get_logger

logger = get_logger(__name__)


class SlpInstruction(NamedTuple):
    """``dst = opcode(src1, src2)``; src2 is -1 for unary opcodes"""

    opcode: Op
    src1: int
    src2: int
    dst: int


@dataclass(frozen=True)
class StraightLineProgram:
    """Branch-free program compiled from a tape"""

    instructions: Tuple[SlpInstruction, ...]
    n_registers: int
    input_map: Tuple[int, ...]
    output_map: Tuple[int, ...]
    constant_pool: Tuple[Tuple[int, float], ...]
    name: str = "f"

    @property
    def n_inputs(self) -> int:
        return len(self.input_map)

    @property
    def n_outputs(self) -> int:
        return len(self.output_map)

    @property
    def n_instructions(self) -> int:
        return len(self.instructions)

    def new_workspace(self) -> List[float]:
        """Register file with the constant pool already loaded"""
        registers = [0.0] * self.n_registers
        for register, value in self.constant_pool:
            registers[register] = value
        return registers

    def evaluate(self, x: Sequence[float], workspace: Optional[List[float]] = None) -> List[float]:
        """
        Interpret the program

        Args:
            x: Input vector
            workspace: Register file from ``new_workspace``; reused across calls

        Returns:
            Output values
        """
        if len(x) != self.n_inputs:
            raise DimensionError(f"Program '{self.name}' expects {self.n_inputs} inputs, got {len(x)}")
        regs = self.new_workspace() if workspace is None else workspace
        if isinstance(x, np.ndarray):
            x = x.tolist()
        for register, value in zip(self.input_map, x):
            regs[register] = value
        unary = UNARY_FUNCTIONS
        for op, a, b, dst in self.instructions:
            if op == Op.MUL:
                regs[dst] = regs[a] * regs[b]
            elif op == Op.ADD:
                regs[dst] = regs[a] + regs[b]
            elif op == Op.SUB:
                regs[dst] = regs[a] - regs[b]
            elif op == Op.DIV:
                regs[dst] = regs[a] / regs[b]
            else:
                regs[dst] = unary[op](regs[a])
        return [regs[r] for r in self.output_map]

    @cached_property
    def kernel(self) -> Callable[[Sequence[float]], tuple]:
        """Generated Python function with the same semantics as ``evaluate``"""
        from src.compile.pycodegen import build_python_kernel

        return build_python_kernel(self)

    def __call__(self, x: Sequence[float]) -> np.ndarray:
        if len(x) != self.n_inputs:
            raise DimensionError(f"Program '{self.name}' expects {self.n_inputs} inputs, got {len(x)}")
        if isinstance(x, np.ndarray):
            x = x.tolist()
        return np.array(self.kernel(x), dtype=float)


def _last_uses(tape: Tape) -> List[int]:
    """Position of the last reader of every entry; outputs never die"""
    never = len(tape)
    last = list(range(len(tape)))
    for i, op in enumerate(tape.ops):
        if op <= Op.CONST:
            continue
        last[tape.arg1[i]] = i
        if op in BINARY_OPS:
            last[tape.arg2[i]] = i
    for index in tape.output_indices:
        last[index] = never
    return last


def allocate_registers(tape: Tape, reuse: bool = True, name: str = "f") -> StraightLineProgram:
    """
    Lower a tape onto a register file

    Args:
        tape: Tape, usually already optimized
        reuse: Recycle temporary registers (lowest free register first)
        name: Program name used by code generation

    Returns:
        StraightLineProgram
    """
    register = [-1] * len(tape)
    for node in tape.input_nodes:
        register[node] = tape.arg1[node]
    n_inputs = tape.n_inputs

    constant_pool = []
    next_register = n_inputs
    for i, op in enumerate(tape.ops):
        if op == Op.CONST:
            register[i] = next_register
            constant_pool.append((next_register, tape.consts[i]))
            next_register += 1

    last = _last_uses(tape) if reuse else None
    free: List[int] = []
    expiring: dict = {}
    instructions = []
    for i, op in enumerate(tape.ops):
        if op <= Op.CONST:
            continue
        a = register[tape.arg1[i]]
        b = register[tape.arg2[i]] if op in BINARY_OPS else -1

        if reuse:
            # operands read here for the last time free their registers first
            for reg in expiring.pop(i, ()):
                heapq.heappush(free, reg)
        if free:
            dst = heapq.heappop(free)
        else:
            dst = next_register
            next_register += 1
        register[i] = dst
        if reuse:
            if last[i] == i:
                # never read
                heapq.heappush(free, dst)
            else:
                expiring.setdefault(last[i], []).append(dst)
        instructions.append(SlpInstruction(Op(op), a, b, dst))

    return StraightLineProgram(
        instructions=tuple(instructions),
        n_registers=next_register,
        input_map=tuple(range(n_inputs)),
        output_map=tuple(register[i] for i in tape.output_indices),
        constant_pool=tuple(constant_pool),
        name=name,
    )


def compile_function(
    tape: Tape,
    passes: Optional[OptimizationConfig] = None,
    name: str = "f",
) -> StraightLineProgram:
    """
    Compile a tape into an optimized straight-line program

    Args:
        tape: Recorded tape
        passes: Pass switches; everything enabled by default
        name: Program name

    Returns:
        StraightLineProgram whose outputs match ``tape.replay``
    """
    passes = passes or OptimizationConfig()
    optimized = optimize(tape, passes)
    program = allocate_registers(optimized, reuse=passes.allocate_registers, name=name)
    logger.info(
        f"Compiled '{name}': {tape.n_arithmetic} tape instructions -> "
        f"{program.n_instructions} program instructions, {program.n_registers} registers"
    )
    return program


__all__ = ["SlpInstruction", "StraightLineProgram", "allocate_registers", "compile_function"]
