"""
Portable scalar source text for compiled programs

The dialect is C-like: double-precision locals, one statement per
instruction, libm function names. Inputs are read as ``x[i]`` and outputs
written as ``y[k]``; constants appear as literals.
"""
import math
from pathlib import Path
from typing import Union

from src.autodiff.tape import BINARY_OPS, Op
from src.compile.pycodegen import BINARY_SYMBOLS, FUNCTION_NAMES
from src.compile.program import StraightLineProgram
from src.utils.logger import get_logger

logger = get_logger(__name__)


def c_literal(value: float) -> str:
    if math.isnan(value):
        return "NAN"
    if math.isinf(value):
        return "INFINITY" if value > 0 else "(-INFINITY)"
    text = repr(float(value))
    return f"({text})" if text.startswith("-") else text


def emit_source(program: StraightLineProgram, function_name: str) -> str:
    """
    Render a program as C-like source text

    Args:
        program: Compiled program
        function_name: Name of the emitted function

    Returns:
        Deterministic source text
    """
    inputs = {register: slot for slot, register in enumerate(program.input_map)}
    constants = dict(program.constant_pool)

    def operand(register: int) -> str:
        if register in inputs:
            return f"x[{inputs[register]}]"
        if register in constants:
            return c_literal(constants[register])
        return f"r{register}"

    temporaries = sorted({instr.dst for instr in program.instructions})
    lines = [
        f"/* {program.n_inputs} inputs, {program.n_outputs} outputs, "
        f"{program.n_instructions} instructions */",
        f"void {function_name}(const double* x, double* y)",
        "{",
    ]
    if temporaries:
        lines.append("    double " + ", ".join(f"r{r}" for r in temporaries) + ";")
    for op, a, b, dst in program.instructions:
        if op in BINARY_OPS:
            expr = f"{operand(a)} {BINARY_SYMBOLS[op]} {operand(b)}"
        elif op == Op.NEG:
            expr = f"-{operand(a)}"
        else:
            expr = f"{FUNCTION_NAMES[op]}({operand(a)})"
        lines.append(f"    r{dst} = {expr};")
    for k, register in enumerate(program.output_map):
        lines.append(f"    y[{k}] = {operand(register)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_source(
    program: StraightLineProgram,
    function_name: str,
    mode: str,
    directory: Union[str, Path],
) -> Path:
    """Write ``<function>_<mode>.c.txt`` under ``directory``"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{function_name}_{mode}.c.txt"
    path.write_text(emit_source(program, function_name))
    logger.info(f"Emitted {program.n_instructions} instructions to {path}")
    return path


__all__ = ["c_literal", "emit_source", "write_source"]
