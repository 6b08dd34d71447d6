"""
Tests for the derivative providers against each other and against
closed-form identities of the dynamics
"""
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from numpy.testing import assert_allclose

from config.settings import settings
from src.autodiff import scalar
from src.deriv import (
    DifferenceScheme,
    FunctionKind,
    JacobianEngine,
    Provider,
    build_function,
    dMdq_oracle,
    fd_derivatives,
    fd_torque_block,
    floating_base_id_derivatives,
    generic_jacobian,
    get_engine,
    id_derivatives,
    id_parameter_derivatives,
    kinematics_derivatives,
    num_diff_jacobian,
)
import src.deriv.engine as engine_module
from src.autodiff import record
from src.compile import JacobianMode
from src.dynamics import crba, floating_base_inverse_dynamics, random_configuration, rnea
from src.kinematics import end_effector_jacobian
from src.utils.errors import DimensionError, NotFloatingBase, ValidationError

AD_PROVIDERS = [Provider.FORWARD_AD, Provider.REVERSE_AD, Provider.COMPILED_AD]


def max_relative(a, b) -> float:
    """Entry-wise difference scaled by max(1, |b|)"""
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


def random_state(model, rng):
    q = random_configuration(model, rng)
    qd = rng.uniform(-1.0, 1.0, model.nv)
    return q, qd


@pytest.fixture(params=["pendulum", "double_pendulum", "arm6"])
def small_model(request, load):
    return load(request.param)


def test_id_qdd_block_is_mass_matrix(fixture_model, rng):
    """∂τ/∂qdd = M"""
    q, qd = random_state(fixture_model, rng)
    qdd = rng.uniform(-1.0, 1.0, fixture_model.nv)
    derivatives = id_derivatives(fixture_model, q, qd, qdd)
    assert_allclose(derivatives.D_qdd, crba(fixture_model, q).as_array(), atol=1e-9)


def test_fd_torque_block_is_inverse_inertia(fixture_model, rng):
    """∂qdd/∂τ_a = M⁻¹Sᵀ"""
    q, qd = random_state(fixture_model, rng)
    tau = rng.uniform(-1.0, 1.0, fixture_model.nu)
    linearized = fd_derivatives(fixture_model, q, qd, tau)
    M_inv = np.linalg.inv(crba(fixture_model, q).as_array())
    assert_allclose(linearized.B, M_inv[:, list(fixture_model.actuated_indices)], atol=1e-10)
    assert linearized.A_q.shape == (fixture_model.nv, fixture_model.nq)
    assert linearized.A_qd.shape == (fixture_model.nv, fixture_model.nv)


def test_analytic_torque_block(fixture_model, rng):
    """CRBA-based torque block agrees with compiled AD, through both solvers"""
    q, qd = random_state(fixture_model, rng)
    tau = rng.uniform(-1.0, 1.0, fixture_model.nu)
    compiled = fd_torque_block(fixture_model, q, qd, tau)
    for method in ("ltl", "dense"):
        analytic = fd_torque_block(fixture_model, q, qd, tau, Provider.ANALYTIC, method=method)
        assert analytic.shape == (fixture_model.nu, fixture_model.nu)
        assert_allclose(analytic, compiled, atol=1e-10)

    with pytest.raises(ValueError):
        fd_torque_block(fixture_model, q, qd, tau, Provider.ANALYTIC, method="qr")


def test_analytic_provider_rejected_elsewhere(pendulum):
    with pytest.raises(ValueError):
        fd_derivatives(pendulum, [0.1], [0.0], [0.0], Provider.ANALYTIC)
    with pytest.raises(ValueError):
        get_engine(pendulum, FunctionKind.INVERSE_DYNAMICS).jacobian([0.1, 0.0, 0.0], Provider.ANALYTIC)


def test_floating_base_acceleration_block(quad18, rng):
    """∂τ_a/∂qdd_a = (S M⁻¹ Sᵀ)⁻¹"""
    q, qd = random_state(quad18, rng)
    qdd_a = rng.uniform(-1.0, 1.0, quad18.nu)
    derivatives = floating_base_id_derivatives(quad18, q, qd, qdd_a)

    actuated = list(quad18.actuated_indices)
    M_inv = np.linalg.inv(crba(quad18, q).as_array())
    expected = np.linalg.inv(M_inv[np.ix_(actuated, actuated)])
    assert_allclose(derivatives.D_qdd, expected, atol=1e-9)
    assert derivatives.D_q.shape == (quad18.nu, quad18.nq)


def test_floating_base_id_reduces_to_id_with_welded_base(arm6, rng):
    """With every joint actuated (S = I) the floating-base formula differentiates to plain ID"""
    nv = arm6.nv
    q, qd = random_state(arm6, rng)
    qdd = rng.uniform(-1.0, 1.0, nv)

    def welded(x):
        return floating_base_inverse_dynamics(arm6, x[:nv], x[nv:2 * nv], x[2 * nv:])

    y, J = generic_jacobian(welded, np.concatenate([q, qd, qdd]), Provider.FORWARD_AD)
    plain = id_derivatives(arm6, q, qd, qdd)
    assert_allclose(y, rnea(arm6, q, qd, qdd), atol=1e-9)
    assert_allclose(J[:, :nv], plain.D_q, atol=1e-8)
    assert_allclose(J[:, nv:2 * nv], plain.D_qd, atol=1e-8)
    assert_allclose(J[:, 2 * nv:], plain.D_qdd, atol=1e-8)


def test_floating_base_id_matches_numdiff(quad18, rng):
    for _ in range(3):
        q, qd = random_state(quad18, rng)
        qdd_a = rng.uniform(-1.0, 1.0, quad18.nu)
        compiled = floating_base_id_derivatives(quad18, q, qd, qdd_a)
        numeric = floating_base_id_derivatives(quad18, q, qd, qdd_a, Provider.NUMDIFF)
        assert max_relative(numeric.D_q, compiled.D_q) < 1e-4
        assert max_relative(numeric.D_qd, compiled.D_qd) < 1e-4
        assert max_relative(numeric.D_qdd, compiled.D_qdd) < 1e-4


def test_torque_block_is_actuated_corner(quad18, rng):
    """fd_torque_block is the nu x nu actuated corner of the nv x nu B block"""
    q, qd = random_state(quad18, rng)
    tau = rng.uniform(-1.0, 1.0, quad18.nu)
    B = fd_derivatives(quad18, q, qd, tau).B
    block = fd_torque_block(quad18, q, qd, tau)
    assert B.shape == (quad18.nv, quad18.nu)
    assert block.shape == (12, 12)
    assert_allclose(block, B[list(quad18.actuated_indices), :], rtol=1e-10, atol=1e-12)


def test_floating_base_requires_floating_model(arm6):
    with pytest.raises(NotFloatingBase):
        floating_base_id_derivatives(arm6, np.zeros(6), np.zeros(6), np.zeros(6))
    with pytest.raises(NotFloatingBase):
        get_engine(arm6, FunctionKind.FLOATING_BASE_ID)


@pytest.mark.parametrize("kind", [FunctionKind.FORWARD_DYNAMICS, FunctionKind.INVERSE_DYNAMICS, FunctionKind.KINEMATICS])
def test_ad_providers_agree(small_model, kind, rng):
    """Forward, reverse and compiled AD give the same Jacobian"""
    engine = get_engine(small_model, kind)
    for _ in range(3):
        x = engine.probe_point + rng.uniform(-0.1, 0.1, engine.n_in)
        y_ref, J_ref = engine.jacobian(x, Provider.FORWARD_AD)
        assert_allclose(y_ref, engine.value(x), rtol=1e-14, atol=1e-14)
        for provider in AD_PROVIDERS[1:]:
            y, J = engine.jacobian(x, provider)
            assert J.shape == (engine.n_out, engine.n_in)
            assert max_relative(J, J_ref) < 1e-12
            assert max_relative(y, y_ref) < 1e-12


@pytest.mark.parametrize("kind", [FunctionKind.FORWARD_DYNAMICS, FunctionKind.INVERSE_DYNAMICS])
def test_compiled_modes_agree(small_model, kind, rng):
    engine = get_engine(small_model, kind)
    x = engine.probe_point + rng.uniform(-0.1, 0.1, engine.n_in)
    _, J_fwd = engine.jacobian(x, Provider.COMPILED_AD, mode=JacobianMode.FORWARD)
    _, J_rev = engine.jacobian(x, Provider.COMPILED_AD, mode=JacobianMode.REVERSE)
    assert max_relative(J_fwd, J_rev) < 1e-12


@pytest.mark.slow
def test_compiled_modes_agree_quad18(quad18, rng):
    engine = get_engine(quad18, FunctionKind.FORWARD_DYNAMICS)
    x = engine.probe_point
    _, J_fwd = engine.jacobian(x, Provider.COMPILED_AD, mode=JacobianMode.FORWARD)
    _, J_rev = engine.jacobian(x, Provider.COMPILED_AD, mode=JacobianMode.REVERSE)
    assert max_relative(J_fwd, J_rev) < 1e-12


def test_numdiff_within_band(small_model, rng):
    """Finite differences agree loosely, never exactly"""
    engine = get_engine(small_model, FunctionKind.FORWARD_DYNAMICS)
    x = engine.probe_point + rng.uniform(-0.1, 0.1, engine.n_in)
    _, J_ad = engine.jacobian(x, Provider.COMPILED_AD)
    _, J_nd = engine.jacobian(x, Provider.NUMDIFF)
    error = np.max(np.abs(J_nd - J_ad))
    assert 1e-12 < error < 1e-3

    _, J_central = engine.jacobian(x, Provider.NUMDIFF, scheme=DifferenceScheme.CENTRAL)
    assert np.max(np.abs(J_central - J_ad)) < error


def test_column_subsets(double_pendulum, rng):
    """Restricting to a block of inputs returns those columns of the full Jacobian"""
    engine = get_engine(double_pendulum, FunctionKind.FORWARD_DYNAMICS)
    x = engine.probe_point
    columns = engine.function.columns("qd")
    assert columns == [2, 3]
    for provider in AD_PROVIDERS + [Provider.NUMDIFF]:
        _, J = engine.jacobian(x, provider)
        _, J_sub = engine.jacobian(x, provider, wrt=columns)
        assert J_sub.shape == (2, 2)
        assert_allclose(J_sub, J[:, columns], atol=1e-6 if provider == Provider.NUMDIFF else 1e-12)


def test_engine_checks_input_size(pendulum):
    engine = get_engine(pendulum, "fd")
    assert engine.n_in == 3
    assert engine.default_mode == JacobianMode.FORWARD
    with pytest.raises(DimensionError):
        engine.jacobian(np.zeros(4))
    with pytest.raises(DimensionError):
        engine.value([0.0])


def test_engines_are_shared(arm2):
    assert get_engine(arm2, FunctionKind.INVERSE_DYNAMICS) is get_engine(arm2, FunctionKind.INVERSE_DYNAMICS)
    engine = get_engine(arm2, FunctionKind.INVERSE_DYNAMICS)
    assert engine.compiled() is engine.compiled(JacobianMode.REVERSE)


def test_parameter_lifting_only_for_inverse_dynamics(arm2):
    with pytest.raises(ValidationError):
        get_engine(arm2, FunctionKind.FORWARD_DYNAMICS, parameter_link=0)


def test_pendulum_mass_derivative(pendulum):
    """∂τ/∂m = g c cos q at rest, ∂τ/∂izz = qdd"""
    c = pendulum.links[0].inertia.com[0]
    g = -pendulum.gravity[1]
    q = 0.6
    for provider in AD_PROVIDERS:
        J = id_parameter_derivatives(pendulum, [q], [0.0], [0.0], "rod", provider)
        assert J.shape == (1, 10)
        assert_allclose(J[0, 0], g * c * np.cos(q), rtol=1e-12)

    J = id_parameter_derivatives(pendulum, [q], [0.0], [2.0], 0)
    assert_allclose(J[0, 6], 2.0, rtol=1e-12)
    assert_allclose(J[0, 0], g * c * np.cos(q) + c * c * 2.0, rtol=1e-12)


def test_parameter_derivatives_are_linear(arm6, rng):
    """τ is affine in one link's inertial parameters with slope ∂τ/∂θ"""
    q, qd = random_state(arm6, rng)
    qdd = rng.uniform(-1.0, 1.0, 6)
    engine = get_engine(arm6, FunctionKind.INVERSE_DYNAMICS, parameter_link=3)
    theta = engine.probe_point[-10:]
    Y = id_parameter_derivatives(arm6, q, qd, qdd, 3)

    with_link = engine.value(np.concatenate([q, qd, qdd, theta]))
    without_link = engine.value(np.concatenate([q, qd, qdd, np.zeros(10)]))
    assert_allclose(with_link - without_link, Y @ theta, atol=1e-10)


def test_mass_matrix_derivative_oracle(double_pendulum, rng):
    q = random_configuration(double_pendulum, rng)
    dM = dMdq_oracle(double_pendulum, q)
    assert dM.shape == (2, 2, 2)
    # M depends only on the elbow angle
    assert_allclose(dM[:, :, 0], 0.0, atol=1e-14)

    numeric = num_diff_jacobian(
        lambda x: crba(double_pendulum, x).as_array().ravel(), q, DifferenceScheme.CENTRAL
    ).reshape(2, 2, 2)
    assert_allclose(dM, numeric, atol=1e-8)
    assert_allclose(dMdq_oracle(double_pendulum, q, Provider.COMPILED_AD), dM, atol=1e-12)


def test_kinematics_qd_block_is_jacobian(quad18, rng):
    """∂ṗ/∂qd equals the linear rows of the end-effector Jacobian"""
    q, qd = random_state(quad18, rng)
    J = kinematics_derivatives(quad18, q, qd)
    k = len(quad18.end_effectors)
    assert J.shape == (6 * k, quad18.nq + quad18.nv)
    for i, ee in enumerate(quad18.end_effectors):
        rows = slice(3 * k + 3 * i, 3 * k + 3 * i + 3)
        expected = end_effector_jacobian(quad18, q, ee.name)[3:]
        assert_allclose(J[rows, quad18.nq:], expected, atol=1e-12)


def test_generic_jacobian_providers():
    def f(x):
        return [scalar.sin(x[0]) * x[1], scalar.exp(x[1] - x[0])]

    x = np.array([0.3, 0.8])
    expected = np.array([
        [np.cos(0.3) * 0.8, np.sin(0.3)],
        [-np.exp(0.5), np.exp(0.5)],
    ])
    for provider in AD_PROVIDERS:
        _, J = generic_jacobian(f, x, provider)
        assert_allclose(J, expected, rtol=1e-14)
    _, J = generic_jacobian(f, x, Provider.NUMDIFF)
    assert_allclose(J, expected, rtol=1e-8)
    with pytest.raises(ValueError):
        generic_jacobian(f, x, Provider.ANALYTIC)


def test_difference_schemes_order():
    """Higher-order schemes are more accurate on a smooth function"""
    x = np.array([0.7])
    exact = np.cos(0.7)
    errors = [
        abs(num_diff_jacobian(lambda p: [np.sin(p[0])], x, scheme)[0, 0] - exact)
        for scheme in DifferenceScheme
    ]
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-10


def test_tape_disk_cache(arm2, tmp_path, monkeypatch):
    """A recorded tape is stored once and reloaded by later engines"""
    monkeypatch.setattr(settings, "TAPE_CACHE_DIR", tmp_path)
    first = get_engine(arm2, FunctionKind.FORWARD_DYNAMICS, use_disk_cache=True)
    tape = first.tape
    assert first.cache_path.exists()

    second = JacobianEngine(arm2, first.function, first.kind, first.cache_key, use_disk_cache=True)
    loaded = second.tape
    # reloaded tapes carry no recorded primal values
    assert loaded.values == []
    assert loaded.ops == tape.ops
    x = first.probe_point
    assert_allclose(second.jacobian(x, Provider.REVERSE_AD)[1], first.jacobian(x, Provider.REVERSE_AD)[1], rtol=0)


def test_unreadable_cache_is_ignored(arm2, tmp_path, monkeypatch):
    monkeypatch.setattr(settings, "TAPE_CACHE_DIR", tmp_path)
    template = get_engine(arm2, FunctionKind.KINEMATICS)
    engine = JacobianEngine(arm2, template.function, template.kind, template.cache_key, use_disk_cache=True)
    engine.cache_path.write_bytes(b"garbage")
    assert engine.tape.values
    assert engine.tape.n_outputs == template.n_out


def test_engine_records_tape_once_under_concurrent_use(pendulum, monkeypatch):
    """Threads asking for the tape at the same time share a single recording"""
    calls = []

    def slow_record(*args, **kwargs):
        calls.append(1)
        time.sleep(0.05)
        return record(*args, **kwargs)

    monkeypatch.setattr(engine_module, "record", slow_record)
    kind = FunctionKind.FORWARD_DYNAMICS
    engine = JacobianEngine(pendulum, build_function(pendulum, kind), kind, "concurrent")
    with ThreadPoolExecutor(max_workers=4) as pool:
        tapes = list(pool.map(lambda _: engine.tape, range(8)))

    assert len(calls) == 1
    assert all(tape is tapes[0] for tape in tapes)
    assert engine.prepare(Provider.REVERSE_AD) is engine
