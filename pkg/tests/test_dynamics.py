"""
Tests for inverse/forward dynamics, the joint-space inertia matrix and its
tree-sparse factorization
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.autodiff import forward_jacobian, hessian, record
from src.dynamics import (
    aba,
    cholesky,
    cholesky_solve,
    crba,
    floating_base_inverse_dynamics,
    get_nonlinear_terms,
    ltl_factorize,
    ltl_inverse,
    ltl_solve,
    random_configuration,
    random_state,
    rnea,
    selection_transpose,
    solve_spd,
)
from src.kinematics import forward_kinematics
from src.model.builders import chain_model
from src.slq.rollout import rk4_step
from src.spatial import ForceVector
from src.utils.errors import DimensionError, NumericalError


def random_point(model, rng):
    q = random_configuration(model, rng)
    qd = rng.uniform(-1.0, 1.0, model.nv)
    qdd = rng.uniform(-1.0, 1.0, model.nv)
    return q, qd, qdd


def random_wrenches(model, rng, scale=5.0):
    return [
        ForceVector(tuple(rng.uniform(-scale, scale, 3)), tuple(rng.uniform(-scale, scale, 3)))
        if i % 2 == 0 else None
        for i in range(model.n_links)
    ]


def test_aba_inverts_rnea(fixture_model, rng):
    """Forward dynamics of the inverse dynamics torques gives back qdd"""
    for _ in range(10):
        q, qd, qdd = random_point(fixture_model, rng)
        tau = rnea(fixture_model, q, qd, qdd)
        assert_allclose(aba(fixture_model, q, qd, tau), qdd, atol=1e-9)


@pytest.mark.slow
def test_aba_inverts_rnea_on_many_states(fixture_model, rng):
    for _ in range(1000):
        q, qd, qdd = random_point(fixture_model, rng)
        tau = rnea(fixture_model, q, qd, qdd)
        assert_allclose(aba(fixture_model, q, qd, tau), qdd, atol=1e-9)


def test_aba_inverts_rnea_with_external_forces(fixture_model, rng):
    q, qd, qdd = random_point(fixture_model, rng)
    ext = random_wrenches(fixture_model, rng)
    tau = rnea(fixture_model, q, qd, qdd, ext)
    assert_allclose(aba(fixture_model, q, qd, tau, ext), qdd, atol=1e-9)
    # external forces do change the torques
    assert np.max(np.abs(np.array(tau) - np.array(rnea(fixture_model, q, qd, qdd)))) > 1e-6


def test_mass_matrix_and_bias_reproduce_rnea(fixture_model, rng):
    """M qdd + C + G equals inverse dynamics"""
    for _ in range(5):
        q, qd, qdd = random_point(fixture_model, rng)
        M = crba(fixture_model, q).as_array()
        C, G = get_nonlinear_terms(fixture_model, q, qd)
        tau = np.array(rnea(fixture_model, q, qd, qdd))
        assert_allclose(M @ qdd + np.array(C) + np.array(G), tau, atol=1e-10)


def test_mass_matrix_is_symmetric_positive_definite(fixture_model, rng):
    M = crba(fixture_model, random_configuration(fixture_model, rng)).as_array()
    assert M.shape == (fixture_model.nv, fixture_model.nv)
    assert_allclose(M, M.T, atol=1e-12)
    assert np.min(np.linalg.eigvalsh(M)) > 0.0


def test_pendulum_closed_form(pendulum):
    """τ = I_O qdd + m g c cos q for a rod swinging in a vertical plane"""
    link = pendulum.links[0].inertia
    m = link.mass
    c = link.com[0]
    g = -pendulum.gravity[1]
    I_O = link.rotational_inertia[2][2] + m * c * c

    q, qd, qdd = 0.3, 1.7, -0.4
    tau = rnea(pendulum, [q], [qd], [qdd])
    assert_allclose(tau, [I_O * qdd + m * g * c * np.cos(q)], rtol=1e-12)
    assert_allclose(crba(pendulum, [q]).as_array(), [[I_O]], rtol=1e-12)


def test_ltl_factorization(fixture_model, rng):
    """LᵀL reproduces M and keeps the ancestor sparsity pattern"""
    q = random_configuration(fixture_model, rng)
    inertia = crba(fixture_model, q)
    M = inertia.as_array()
    fac = ltl_factorize(inertia, fixture_model)
    L = fac.as_array()

    assert_allclose(L.T @ L, M, atol=1e-10)
    parents = fixture_model.dof_parents
    for k in range(fixture_model.nv):
        ancestors = set()
        i = parents[k]
        while i != -1:
            ancestors.add(i)
            i = parents[i]
        for j in range(fixture_model.nv):
            if j != k and j not in ancestors:
                assert L[k, j] == 0.0


def test_ltl_solve_and_inverse_match_dense(fixture_model, rng):
    q = random_configuration(fixture_model, rng)
    M = crba(fixture_model, q).as_array()
    fac = ltl_factorize(M.tolist(), fixture_model)
    b = rng.uniform(-1.0, 1.0, fixture_model.nv)

    assert_allclose(ltl_solve(fac, b), np.linalg.solve(M, b), atol=1e-9)
    assert_allclose(np.array(ltl_inverse(fac)), np.linalg.inv(M), atol=1e-9)

    with pytest.raises(DimensionError):
        ltl_solve(fac, b[:-1])


def test_ltl_needs_a_tree():
    with pytest.raises(ValueError):
        ltl_factorize([[1.0]])
    with pytest.raises(DimensionError):
        ltl_factorize([[1.0, 0.0], [0.0, 1.0]], parents=[-1])


def test_ltl_rejects_bad_pivot():
    with pytest.raises(NumericalError):
        ltl_factorize([[1.0, 0.0], [0.0, 0.0]], parents=[-1, 0])


def test_dense_cholesky(rng):
    A = rng.uniform(-1.0, 1.0, (5, 5))
    A = A @ A.T + 5.0 * np.eye(5)
    b = rng.uniform(-1.0, 1.0, 5)
    L = np.array(cholesky(A.tolist()))
    assert_allclose(L @ L.T, A, atol=1e-12)
    assert_allclose(cholesky_solve(L.tolist(), b), np.linalg.solve(A, b), atol=1e-12)
    assert_allclose(solve_spd(A.tolist(), b), np.linalg.solve(A, b), atol=1e-12)

    with pytest.raises(NumericalError):
        cholesky([[1.0, 2.0], [2.0, 1.0]])


def test_floating_base_inverse_dynamics(quad18, rng):
    """Actuator torques from fbid produce the requested joint accelerations"""
    for _ in range(5):
        q = random_configuration(quad18, rng)
        qd = rng.uniform(-1.0, 1.0, quad18.nv)
        qdd_a = rng.uniform(-2.0, 2.0, quad18.nu)
        ext = random_wrenches(quad18, rng, scale=20.0)

        tau_a = floating_base_inverse_dynamics(quad18, q, qd, qdd_a, ext)
        assert len(tau_a) == quad18.nu
        qdd = np.array(aba(quad18, q, qd, selection_transpose(quad18, tau_a), ext))
        assert_allclose(qdd[list(quad18.actuated_indices)], qdd_a, atol=1e-9)


def test_floating_base_inverse_dynamics_fixed_base(arm6, rng):
    """On a fixed-base model it reduces to ordinary inverse dynamics"""
    q, qd, qdd = random_point(arm6, rng)
    assert_allclose(floating_base_inverse_dynamics(arm6, q, qd, qdd), rnea(arm6, q, qd, qdd), atol=1e-10)


def test_selection_transpose(quad18):
    tau = selection_transpose(quad18, list(range(1, 13)))
    assert tau[:6] == [0.0] * 6
    assert tau[6:] == list(range(1, 13))
    with pytest.raises(DimensionError):
        selection_transpose(quad18, [0.0] * 18)


def test_dimension_checks(arm6):
    with pytest.raises(DimensionError):
        rnea(arm6, [0.0] * 5, [0.0] * 6, [0.0] * 6)
    with pytest.raises(DimensionError):
        aba(arm6, [0.0] * 6, [0.0] * 6, [0.0] * 7)
    with pytest.raises(DimensionError):
        rnea(arm6, [0.0] * 6, [0.0] * 6, [0.0] * 6, ext_forces=[None])


def test_random_state_respects_pitch_limit(quad18, rng):
    for _ in range(20):
        state = random_state(quad18, rng)
        assert abs(state.q[1]) <= 1.2
        assert state.qd.shape == (quad18.nv,)


def test_aba_cost_grows_linearly():
    """Recorded forward dynamics grows in proportion to the number of links"""

    def fd_tape(n):
        model = chain_model(n)
        nv = model.nv
        probe = np.full(3 * nv, 0.1)
        return record(lambda x: aba(model, x[:nv], x[nv:2 * nv], x[2 * nv:]), 3 * nv, probe).n_arithmetic

    small, large = fd_tape(10), fd_tape(40)
    assert large / small < 4.0 * 1.15


def test_dynamics_on_dual_numbers(double_pendulum, rng):
    """rnea derivatives by dual numbers match the mass matrix in qdd"""
    q = random_configuration(double_pendulum, rng)
    qd = rng.uniform(-1.0, 1.0, 2)
    _, J = forward_jacobian(lambda a: rnea(double_pendulum, q, qd, a), np.zeros(2))
    assert_allclose(J, crba(double_pendulum, q).as_array(), atol=1e-12)


def test_kinetic_energy_hessian_is_mass_matrix(arm6, rng):
    """½ vᵀ M v through inverse dynamics has Hessian M in v"""
    q = random_configuration(arm6, rng)
    zeros = [0.0] * arm6.nv
    gravity = rnea(arm6, q, zeros, zeros)

    def kinetic_energy(v):
        tau = rnea(arm6, q, zeros, v)
        return 0.5 * sum(vi * (ti - gi) for vi, ti, gi in zip(v, tau, gravity))

    H = hessian(kinetic_energy, rng.uniform(-1.0, 1.0, arm6.nv))
    assert_allclose(H, crba(arm6, q).as_array(), atol=1e-10)


def mechanical_energy(model, q, qd):
    """½ q̇ᵀMq̇ plus the gravitational potential of every link's centre of mass"""
    qd = np.asarray(qd)
    kinetic = 0.5 * qd @ crba(model, q).as_array() @ qd
    gravity = np.array(model.gravity)
    potential = 0.0
    for link, pose in zip(model.links, forward_kinematics(model, q)):
        com = np.array(pose.translation) + np.array(pose.rotation).T @ np.array(link.inertia.com)
        potential -= link.inertia.mass * gravity @ com
    return kinetic + potential


@pytest.mark.parametrize("name", ["pendulum", "double_pendulum", "arm6"])
def test_energy_balance_along_rollout(name, load, rng):
    """Energy changes by the work of the joint torques at every RK4 step"""
    model = load(name)
    nv = model.nv
    dt = 1e-3
    tau = rng.uniform(-0.5, 0.5, nv)

    def state_rate(xu):
        q, qd = xu[:nv], xu[nv:2 * nv]
        return np.concatenate([qd, aba(model, q, qd, xu[2 * nv:])])

    x = np.concatenate([random_configuration(model, rng), rng.uniform(-1.0, 1.0, nv)])
    energy = mechanical_energy(model, x[:nv], x[nv:])
    for _ in range(200):
        x_next = rk4_step(state_rate, x, tau, dt)
        energy_next = mechanical_energy(model, x_next[:nv], x_next[nv:])
        # constant torques: the work over a step is τᵀΔq
        residual = energy_next - energy - tau @ (x_next[:nv] - x[:nv])
        assert abs(residual) < 1e-6
        x, energy = x_next, energy_next
