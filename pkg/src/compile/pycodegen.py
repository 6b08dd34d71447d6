"""
Python code generation for straight-line programs

The generated module imports its math functions once; the function body is
one assignment per instruction over local register variables.
"""
import math
from typing import Callable, Dict

from pytools.py_codegen import Indentation, PythonCodeGenerator

from src.autodiff.tape import BINARY_OPS, Op

BINARY_SYMBOLS: Dict[int, str] = {Op.ADD: "+", Op.SUB: "-", Op.MUL: "*", Op.DIV: "/"}

FUNCTION_NAMES: Dict[int, str] = {
    Op.SIN: "sin",
    Op.COS: "cos",
    Op.TAN: "tan",
    Op.EXP: "exp",
    Op.LOG: "log",
    Op.SQRT: "sqrt",
    Op.ABS: "fabs",
}


def python_literal(value: float) -> str:
    """Round-trip exact float literal"""
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "(-inf)"
    text = repr(float(value))
    return f"({text})" if text.startswith("-") else text


def python_source(program) -> str:
    """Source text of a module defining ``program.name(x)``"""
    constants = dict(program.constant_pool)

    def operand(register: int) -> str:
        if register in constants:
            return python_literal(constants[register])
        return f"r{register}"

    gen = PythonCodeGenerator()
    gen(f"from math import {', '.join(sorted(set(FUNCTION_NAMES.values())))}, inf, nan")
    gen("")
    gen(f"def {program.name}(x):")
    with Indentation(gen):
        if program.n_inputs:
            gen(", ".join(f"r{r}" for r in program.input_map) + ", = x")
        for op, a, b, dst in program.instructions:
            if op in BINARY_OPS:
                gen(f"r{dst} = {operand(a)} {BINARY_SYMBOLS[op]} {operand(b)}")
            elif op == Op.NEG:
                gen(f"r{dst} = -{operand(a)}")
            else:
                gen(f"r{dst} = {FUNCTION_NAMES[op]}({operand(a)})")
        gen("return (" + "".join(f"{operand(r)}, " for r in program.output_map) + ")")
    return gen.get()


def build_python_kernel(program) -> Callable:
    """Compile the generated source and return the function object"""
    module = PythonCodeGenerator()
    module(python_source(program))
    return module.get_module(name=f"<slp {program.name}>")[program.name]


__all__ = ["python_literal", "python_source", "build_python_kernel", "BINARY_SYMBOLS", "FUNCTION_NAMES"]
