"""
Tests for the soft ground contact model and the floating-base system dynamics
"""
import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.autodiff import forward_jacobian
from src.contact import (
    ContactModelParams,
    SystemDynamicsConfig,
    contact_external_forces,
    contact_force_body_frame,
    contact_force_contact_frame,
    load_contact_params,
    standing_height,
    standing_state,
    static_torques,
    system_dynamics,
)
from src.deriv import DifferenceScheme, num_diff_jacobian
from src.dynamics import aba, rnea
from src.kinematics import end_effector_jacobian, feet_kinematics
from src.spatial import euler_xyz_matrix
from src.utils.errors import (
    DimensionError,
    NotFloatingBase,
    SingularOrientation,
    UnknownEndEffector,
    ValidationError,
)

PARAMS = ContactModelParams()


@pytest.fixture(scope="module")
def quad_config(load):
    return SystemDynamicsConfig(load("quad18"))


@pytest.fixture(scope="module")
def stance(quad_config):
    return standing_state(quad_config)


def perturbed_stance(stance, model, rng, scale=0.02):
    """Standing state with small joint, base and velocity perturbations"""
    x = stance.copy()
    x[:model.nq] += rng.uniform(-scale, scale, model.nq)
    x[model.nq:] += rng.uniform(-10.0 * scale, 10.0 * scale, model.nv)
    return x


def test_contact_frame_force_values():
    at_surface = contact_force_contact_frame(PARAMS, 0.0, [0.0, 0.0, 0.0])
    assert_allclose(at_surface, [0.0, 0.0, PARAMS.k])

    moving = contact_force_contact_frame(PARAMS, 0.0, [0.2, -0.1, 0.3])
    half_damping = 0.5 * PARAMS.d
    assert_allclose(moving, [-half_damping * 0.2, half_damping * 0.1, PARAMS.k - half_damping * 0.3])

    below = contact_force_contact_frame(PARAMS, 0.01, [0.0, 0.0, 0.0])
    assert_allclose(below[2], PARAMS.k * math.exp(PARAMS.alpha_k * 0.01))


def test_contact_force_vanishes_above_surface():
    """Far above the surface the force is a negligible fraction of k and d"""
    pdot = [1.0, -1.0, 2.0]
    speed = np.linalg.norm(pdot)
    for clearance in (21.0 / PARAMS.alpha_k, 0.5, 2.0):
        force = np.array(contact_force_contact_frame(PARAMS, -clearance, pdot))
        assert np.linalg.norm(force) < 1e-9 * (PARAMS.k + PARAMS.d * speed)


def test_contact_force_negligible_at_clearance():
    """At a clearance of 21/alpha_k the reaction is below 1e-9 k for slow feet"""
    clearance = 21.0 / PARAMS.alpha_k
    for pdot in ([0.0, 0.0, 0.0], [0.5, -0.5, 0.5]):
        force = np.array(contact_force_contact_frame(PARAMS, -clearance, pdot))
        assert np.linalg.norm(force) < 1e-9 * PARAMS.k


def test_damper_never_injects_power(rng):
    """The damping part of the reaction does non-positive work on the foot"""
    for depth in (0.01, 0.05, 0.2, -0.02):
        for _ in range(20):
            pdot = rng.uniform(-1.0, 1.0, 3)
            # outward: the foot leaves the ground
            pdot[2] = abs(pdot[2]) + 0.1
            total = np.array(contact_force_contact_frame(PARAMS, depth, pdot))
            spring_only = np.array(contact_force_contact_frame(PARAMS, depth, [0.0, 0.0, 0.0]))
            damper = total - spring_only
            assert damper[2] < 0.0
            assert float(damper @ pdot) <= 0.0


def test_contact_force_gradient(quad_config, stance, rng):
    """AD derivatives of the contact forces match central differences"""
    model = quad_config.model
    nq = model.nq

    def stacked_forces(x):
        forces = contact_external_forces(quad_config, x[:nq], x[nq:])
        return [c for wrench in forces if wrench is not None for c in (*wrench.torque, *wrench.force)]

    for _ in range(5):
        x = perturbed_stance(stance, model, rng)
        _, J_ad = forward_jacobian(stacked_forces, x)
        J_nd = num_diff_jacobian(lambda p: stacked_forces(p.tolist()), x, DifferenceScheme.CENTRAL)
        scale = np.maximum(1.0, np.abs(J_ad))
        assert np.max(np.abs(J_ad - J_nd) / scale) < 1e-4


def test_system_dynamics_jacobian_is_smooth(quad_config, stance, rng):
    """Tiny state perturbations move the Jacobian by a tiny relative amount"""
    model = quad_config.model
    nx = model.nq + model.nv
    u = static_torques(quad_config, stance)

    def jacobian(x):
        return forward_jacobian(lambda z: system_dynamics(quad_config, z[:nx], z[nx:]), np.concatenate([x, u]))[1]

    for _ in range(3):
        x = perturbed_stance(stance, model, rng)
        J = jacobian(x)
        J_moved = jacobian(x + rng.uniform(-1e-6, 1e-6, nx))
        assert np.max(np.abs(J_moved - J)) < 1e-3 * max(1.0, np.max(np.abs(J)))


def test_standing_height_carries_the_weight(quad_config, stance):
    model = quad_config.model
    height = standing_height(quad_config)
    assert stance[5] == height
    # straight legs put the feet 0.68 m below the base, slightly above the ground
    assert 0.68 < height < 0.8

    feet = np.array(feet_kinematics(model, stance[:model.nq], np.zeros(model.nv)))
    feet_z = feet[2:12:3]
    assert np.all(feet_z > PARAMS.surface_height)
    total = sum(
        contact_force_contact_frame(PARAMS, PARAMS.surface_height - z, [0.0, 0.0, 0.0])[2] for z in feet_z
    )
    assert_allclose(total, model.total_mass() * abs(model.gravity[2]), rtol=1e-9)


def test_standing_state_is_an_equilibrium(quad_config, stance):
    """Static torques hold the symmetric stance with no acceleration"""
    u = static_torques(quad_config, stance)
    assert u.shape == (12,)
    xdot = np.array(system_dynamics(quad_config, stance, u))
    assert np.max(np.abs(xdot)) < 1e-6


def test_contact_forces_as_generalized_forces(quad_config, stance, rng):
    """Link wrenches from contact act on the joints like Jᵀ F"""
    model = quad_config.model
    x = perturbed_stance(stance, model, rng)
    q, qd = x[:model.nq], x[model.nq:]
    qdd = rng.uniform(-1.0, 1.0, model.nv)

    ext = contact_external_forces(quad_config, q, qd)
    with_contact = np.array(rnea(model, q, qd, qdd, ext))
    free = np.array(rnea(model, q, qd, qdd))

    feet = np.array(feet_kinematics(model, q, qd))
    generalized = np.zeros(model.nv)
    for i, ee in enumerate(model.end_effectors):
        position, velocity = feet[3 * i:3 * i + 3], feet[12 + 3 * i:12 + 3 * i + 3]
        world_force = contact_force_contact_frame(PARAMS, PARAMS.surface_height - position[2], velocity)
        generalized += end_effector_jacobian(model, q, ee.name)[3:].T @ np.array(world_force)
    assert_allclose(free - with_contact, generalized, atol=1e-8)


def test_body_frame_force(quad_config, stance, rng):
    """Body-frame force is the world force rotated by Rᵀ"""
    model = quad_config.model
    x = perturbed_stance(stance, model, rng)
    x[2] = 0.7
    q, qd = x[:model.nq], x[model.nq:]

    feet = np.array(feet_kinematics(model, q, qd))
    world = contact_force_contact_frame(PARAMS, -feet[5], feet[15:18])
    body = contact_force_body_frame(quad_config, q, qd, "rf_foot")
    R = np.array(euler_xyz_matrix(q[:3]))
    assert body.torque == (0.0, 0.0, 0.0)
    assert_allclose(body.force, R.T @ np.array(world), atol=1e-9)

    by_index = contact_force_body_frame(quad_config, q, qd, 1)
    assert_allclose(by_index.force, body.force, rtol=0)


def test_body_frame_force_errors(quad_config, arm6, stance):
    model = quad_config.model
    q, qd = stance[:model.nq], stance[model.nq:]
    with pytest.raises(UnknownEndEffector):
        contact_force_body_frame(quad_config, q, qd, 7)
    with pytest.raises(UnknownEndEffector):
        contact_force_body_frame(quad_config, q, qd, "tail")
    with pytest.raises(ValidationError):
        contact_force_body_frame(SystemDynamicsConfig(model, None), q, qd, 0)
    with pytest.raises(NotFloatingBase):
        contact_force_body_frame(SystemDynamicsConfig(arm6), np.zeros(6), np.zeros(6), 0)
    with pytest.raises(DimensionError):
        contact_force_body_frame(quad_config, q[:-1], qd, 0)


def test_config_end_effectors(quad18):
    assert SystemDynamicsConfig(quad18).end_effectors == ("lf_foot", "rf_foot", "lh_foot", "rh_foot")
    assert SystemDynamicsConfig(quad18, None).end_effectors == ()
    subset = SystemDynamicsConfig(quad18, PARAMS, ("rh_foot",))
    assert [ee.name for ee in subset.contacts] == ["rh_foot"]
    assert subset.state_dimension == 36
    assert subset.input_dimension == 12
    with pytest.raises(UnknownEndEffector):
        SystemDynamicsConfig(quad18, PARAMS, ("paw",))


def test_system_dynamics_without_contact(arm6, rng):
    """Fixed base: ẋ = [qd, aba(q, qd, u)]"""
    config = SystemDynamicsConfig(arm6, None)
    x = rng.uniform(-1.0, 1.0, 12)
    u = rng.uniform(-1.0, 1.0, 6)
    xdot = system_dynamics(config, x, u)
    assert_allclose(xdot[:6], x[6:])
    assert_allclose(xdot[6:], aba(arm6, x[:6], x[6:], u), rtol=1e-14)


def test_system_dynamics_checks(quad_config, stance):
    u = np.zeros(12)
    with pytest.raises(DimensionError):
        system_dynamics(quad_config, stance[:-1], u)
    with pytest.raises(DimensionError):
        system_dynamics(quad_config, stance, u[:-1])

    tilted = stance.copy()
    tilted[1] = 1.4
    with pytest.raises(SingularOrientation):
        system_dynamics(quad_config, tilted, u)


def test_standing_requires_floating_base(arm6):
    with pytest.raises(NotFloatingBase):
        standing_height(SystemDynamicsConfig(arm6))


def test_load_contact_params(tmp_path):
    """Camel-case keys, bare or under a contact section"""
    nested = tmp_path / "problem.json"
    nested.write_text(json.dumps({"name": "x", "contact": {"k": 100.0, "alphaK": 10.0, "surfaceHeight": 0.2}}))
    params = load_contact_params(nested)
    assert params.k == 100.0
    assert params.alpha_k == 10.0
    assert params.surface_height == 0.2
    assert params.d == PARAMS.d

    bare = tmp_path / "contact.json"
    bare.write_text(json.dumps({"d": 20.0, "alpha_d": 5.0}))
    params = load_contact_params(bare)
    assert (params.d, params.alpha_d) == (20.0, 5.0)

    invalid = tmp_path / "invalid.json"
    invalid.write_text(json.dumps({"k": -1.0}))
    with pytest.raises(ValidationError):
        load_contact_params(invalid)

    with pytest.raises(ValidationError):
        load_contact_params(tmp_path / "missing.json")
