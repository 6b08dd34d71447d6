"""
Tests for the tape optimizer, register allocation, code generation and
compiled derivative programs
"""
import math
import re

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.autodiff import Op, Tape, forward_jacobian, record, reverse_jacobian
from src.autodiff import scalar
from src.compile import (
    ExpressionBuilder,
    JacobianMode,
    OptimizationConfig,
    compile_function,
    compile_jacobian,
    eliminate_common_subexpressions,
    eliminate_dead_code,
    emit_source,
    fold_constants,
    optimize,
    python_source,
    simplify,
    write_source,
)
from src.compile.emit import c_literal
from src.deriv import FunctionKind, get_engine, sample_point
from src.dynamics import rnea
from src.utils.errors import DimensionError


def redundant_function(x):
    """Repeated subexpressions, identities, foldable constants and dead work"""
    s = scalar.sin(x[0] * x[1])
    t = scalar.sin(x[0] * x[1])
    unused = scalar.exp(x[2]) * 3.0
    k = (2.0 * 3.0) * x[2] * 1.0 + 0.0
    return [s + t * k, s - (x[1] * 1.0) / 1.0, -(-(x[2] + x[0]))]


POINT = [0.4, -1.3, 0.8]


def build_tape():
    """Tape by hand: out0 = a*b + a, out1 = a*b, with an unused entry"""
    tape = Tape(2)
    x0 = tape.add_input(0)
    x1 = tape.add_input(1)
    p = tape.append(Op.MUL, x0, x1)
    q = tape.append(Op.MUL, x1, x0)
    tape.append(Op.EXP, p)
    s = tape.append(Op.ADD, q, x0)
    tape.output_indices = [s, p]
    return tape


def test_fold_constants():
    tape = Tape(1)
    x = tape.add_input(0)
    two = tape.constant(2.0)
    three = tape.constant(3.0)
    six = tape.append(Op.MUL, two, three)
    root = tape.append(Op.SQRT, six)
    out = tape.append(Op.ADD, x, root)
    tape.output_indices = [out]

    folded = fold_constants(tape)
    assert folded.n_arithmetic == 1
    assert folded.replay([1.0]) == [1.0 + math.sqrt(6.0)]


def test_fold_keeps_failing_operations():
    """A constant division by zero is not folded away"""
    tape = Tape(1)
    x = tape.add_input(0)
    bad = tape.append(Op.DIV, tape.constant(1.0), tape.constant(0.0))
    tape.output_indices = [tape.append(Op.ADD, x, bad)]
    assert fold_constants(tape).n_arithmetic == 2


def test_simplify_identities():
    tape = record(lambda x: [x[0] * 1.0 + 0.0, 0.0 - x[0], -(-x[1]), x[1] / -1.0, x[0] * 0.0], 2, [0.5, 2.0])
    simplified = simplify(tape)
    x = [1.7, -0.2]
    assert simplified.replay(x) == tape.replay(x)
    # one negation from the subtraction, one from the division
    assert eliminate_dead_code(simplified).n_arithmetic == 2


def test_cse_merges_commutative_duplicates():
    tape = build_tape()
    merged = eliminate_common_subexpressions(tape)
    muls = [op for op in merged.ops if op == Op.MUL]
    assert len(muls) == 1
    assert merged.replay([3.0, 5.0]) == tape.replay([3.0, 5.0])


def test_dce_keeps_input_entries():
    """Dead arithmetic goes, every input slot stays"""
    tape = Tape(3)
    x0 = tape.add_input(0)
    tape.add_input(1)
    tape.add_input(2)
    tape.append(Op.SIN, x0)
    tape.output_indices = [x0]

    pruned = eliminate_dead_code(tape)
    assert pruned.n_arithmetic == 0
    assert [pruned.ops[i] for i in pruned.input_nodes] == [Op.INPUT] * 3
    assert pruned.replay([4.0, 5.0, 6.0]) == [4.0]


def test_dce_removes_exactly_the_dead_entries():
    """Removing any surviving entry would change an output"""
    tape = build_tape()
    pruned = eliminate_dead_code(tape)
    assert Op.EXP not in pruned.ops
    assert pruned.n_arithmetic == 3

    x = [0.3, 0.9]
    reference = pruned.replay(x)
    for i, op in enumerate(pruned.ops):
        if op <= Op.CONST:
            continue
        mutated = eliminate_dead_code(pruned)
        # replace the entry by a constant and check an output moves
        mutated.ops[i] = Op.CONST
        mutated.consts[i] = 12345.0
        assert mutated.replay(x) != reference


def test_optimize_preserves_values():
    """The optimized tape agrees with the raw recording on random inputs"""
    tape = record(redundant_function, 3, POINT)
    optimized = optimize(tape)
    assert optimized.n_arithmetic < tape.n_arithmetic

    rng = np.random.default_rng(3)
    for _ in range(50):
        x = rng.uniform(-2.0, 2.0, 3)
        assert_allclose(optimized.replay(x), tape.replay(x), rtol=1e-15, atol=0)


def test_optimize_on_dynamics_tape(arm6, rng):
    """Compiled inverse dynamics matches replay of the raw tape"""
    nv = arm6.nv

    def inverse_dynamics(x):
        return rnea(arm6, x[:nv], x[nv:2 * nv], x[2 * nv:])

    probe = rng.uniform(-1.0, 1.0, 3 * nv)
    tape = record(inverse_dynamics, 3 * nv, probe)
    program = compile_function(tape, name="arm6_id")
    raw = compile_function(tape, OptimizationConfig.none(), name="arm6_id_raw")
    assert program.n_instructions < raw.n_instructions
    assert raw.n_instructions == tape.n_arithmetic

    for _ in range(10):
        x = rng.uniform(-1.0, 1.0, 3 * nv)
        expected = np.array(tape.replay(x))
        scale = np.maximum(np.abs(expected), 1.0)
        assert np.max(np.abs(program(x) - expected) / scale) <= 1e-15
        assert_allclose(raw(x), expected, rtol=0, atol=0)


@pytest.mark.slow
@pytest.mark.parametrize("kind", [FunctionKind.FORWARD_DYNAMICS, FunctionKind.INVERSE_DYNAMICS])
def test_optimized_programs_match_replay_on_many_states(fixture_model, kind, rng):
    """Optimized programs agree with raw replay on 1000 random states, quad18 fd included"""
    engine = get_engine(fixture_model, kind)
    tape = engine.tape
    program = compile_function(tape, name=f"{fixture_model.name}_{kind.value}")
    assert program.n_instructions <= tape.n_arithmetic

    for _ in range(1000):
        x = sample_point(fixture_model, engine.function, rng)
        expected = np.array(tape.replay(x))
        scale = np.maximum(np.abs(expected), 1.0)
        assert np.max(np.abs(program(x) - expected) / scale) <= 1e-15


def test_register_reuse():
    """Allocation keeps far fewer registers than instructions on a long chain"""

    def chain(x):
        acc = x[0]
        for _ in range(50):
            acc = scalar.sin(acc) * x[1] + acc
        return [acc]

    tape = record(chain, 2, [0.1, 0.2])
    allocated = compile_function(tape)
    unallocated = compile_function(tape, OptimizationConfig(allocate_registers=False))
    assert allocated.n_registers < 10
    assert unallocated.n_registers > allocated.n_registers
    x = [0.3, -0.7]
    assert allocated.evaluate(x) == unallocated.evaluate(x) == tape.replay(x)


def test_kernel_matches_interpreter():
    tape = record(redundant_function, 3, POINT)
    program = compile_function(tape, name="redundant")
    workspace = program.new_workspace()
    for x in ([0.1, 0.2, 0.3], [1.5, -0.5, 2.0]):
        assert list(program.kernel(x)) == program.evaluate(x, workspace)
        assert_allclose(program(np.array(x)), program.evaluate(x), rtol=0, atol=0)

    with pytest.raises(DimensionError):
        program([1.0])
    with pytest.raises(DimensionError):
        program.evaluate([1.0, 2.0])


def test_python_source_is_deterministic():
    tape = record(redundant_function, 3, POINT)
    first = python_source(compile_function(tape, name="g"))
    second = python_source(compile_function(record(redundant_function, 3, POINT), name="g"))
    assert first == second
    assert first.splitlines()[2].startswith("def g(x):")


def evaluate_emitted(source: str, x) -> list:
    """Interpret emitted C-like text by translating it line by line"""
    namespace = {"x": list(x), "y": {}}
    exec("from math import sin, cos, tan, exp, log, sqrt, fabs, inf, nan", namespace)
    namespace.update(NAN=math.nan, INFINITY=math.inf)
    for line in source.splitlines():
        line = line.strip()
        if not re.match(r"^(r\d+|y\[\d+\]) = ", line):
            continue
        exec(line.rstrip(";"), namespace)
    y = namespace["y"]
    return [y[k] for k in range(len(y))]


def test_emitted_source_evaluates_like_program(tmp_path):
    tape = record(redundant_function, 3, POINT)
    program = compile_function(tape, name="redundant")
    source = emit_source(program, "redundant")
    assert source == emit_source(program, "redundant")
    assert "void redundant(const double* x, double* y)" in source

    for x in ([0.1, 0.2, 0.3], [-1.0, 0.5, 2.5]):
        assert evaluate_emitted(source, x) == program.evaluate(x)

    path = write_source(program, "redundant", "fwd", tmp_path)
    assert path.name == "redundant_fwd.c.txt"
    assert path.read_text() == source


def test_c_literals():
    assert c_literal(1.5) == "1.5"
    assert c_literal(-2.0) == "(-2.0)"
    assert c_literal(math.inf) == "INFINITY"
    assert c_literal(0.1) == repr(0.1)


def test_expression_builder_canonicalizes():
    builder = ExpressionBuilder(2)
    a = builder.input(0)
    b = builder.input(1)
    assert builder.emit(Op.MUL, a, b) == builder.emit(Op.MUL, b, a)
    assert builder.emit(Op.SUB, a, b) != builder.emit(Op.SUB, b, a)
    assert builder.emit(Op.ADD, a, builder.constant(0.0)) == a
    assert builder.is_constant(builder.emit(Op.MUL, builder.constant(2.0), builder.constant(4.0)), 8.0)


def test_compiled_jacobian_modes_agree():
    """Forward and reverse derivative programs produce the same Jacobian"""
    tape = record(redundant_function, 3, POINT)
    forward = compile_jacobian(tape, JacobianMode.FORWARD)
    reverse = compile_jacobian(tape, JacobianMode.REVERSE)

    rng = np.random.default_rng(11)
    for _ in range(10):
        x = rng.uniform(-1.5, 1.5, 3)
        y_f, J_f = forward(x)
        y_r, J_r = reverse(x)
        _, J_ref = reverse_jacobian(tape, x)
        assert_allclose(y_f, tape.replay(x), rtol=1e-15)
        assert_allclose(J_f, J_r, rtol=1e-12, atol=1e-12)
        assert_allclose(J_r, J_ref, rtol=1e-12, atol=1e-12)
        assert J_f.shape == (3, 3)


def test_compiled_jacobian_column_subset():
    tape = record(redundant_function, 3, POINT)
    full = compile_jacobian(tape)
    sub = compile_jacobian(tape, wrt=[2, 0])
    assert sub.columns == (2, 0)
    x = np.array([0.2, 0.6, -0.4])
    _, J = full(x)
    _, J_sub = sub(x)
    assert_allclose(J_sub, J[:, [2, 0]], rtol=1e-14, atol=1e-15)
    assert_allclose(sub.evaluate(x)[1], J_sub, rtol=0, atol=0)


def test_compiled_abs_slope_frozen_at_recording_point():
    """The slope of |x| follows the recorded sign"""
    tape = record(lambda x: [scalar.fabs(x[0])], 1, [-1.0])
    derivative = compile_jacobian(tape, JacobianMode.FORWARD)
    y, J = derivative([2.0])
    assert y[0] == 2.0
    assert J[0, 0] == -1.0


def test_compiled_jacobian_on_dynamics(double_pendulum, rng):
    """Derivative program of inverse dynamics against dual numbers"""
    nv = double_pendulum.nv

    def inverse_dynamics(x):
        return rnea(double_pendulum, x[:nv], x[nv:2 * nv], x[2 * nv:])

    x = rng.uniform(-1.0, 1.0, 3 * nv)
    tape = record(inverse_dynamics, 3 * nv, x)
    for mode in JacobianMode:
        _, J = compile_jacobian(tape, mode)(x)
        _, J_dual = forward_jacobian(inverse_dynamics, x)
        assert_allclose(J, J_dual, rtol=1e-12, atol=1e-12)
