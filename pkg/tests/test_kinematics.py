"""
Tests for forward kinematics, end-effector maps and the configuration rate
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.autodiff import forward_jacobian
from src.dynamics import random_configuration
from src.kinematics import (
    configuration_rate,
    end_effector_jacobian,
    end_effector_position,
    end_effector_transform,
    end_effector_velocity,
    feet_kinematics,
    forward_kinematics,
)
from src.spatial import euler_xyz_matrix
from src.utils.errors import DimensionError, UnknownEndEffector


def skew(v):
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


@pytest.fixture(params=["pendulum", "double_pendulum", "arm2", "arm6", "quad18"])
def ee_model(request, load):
    """Every fixture with at least one end-effector"""
    return load(request.param)


def test_pendulum_bob_position(pendulum):
    for q in (0.0, 0.4, -2.0):
        assert_allclose(end_effector_position(pendulum, [q], "bob"), [0.5 * np.cos(q), 0.5 * np.sin(q), 0.0], atol=1e-15)


def test_planar_arm_hand_position(arm2):
    q1, q2 = 0.3, -1.1
    expected = [
        0.5 * np.cos(q1) + 0.5 * np.cos(q1 + q2),
        0.5 * np.sin(q1) + 0.5 * np.sin(q1 + q2),
        0.0,
    ]
    assert_allclose(end_effector_position(arm2, [q1, q2], "hand"), expected, atol=1e-15)


def test_link_poses_follow_the_chain(arm2):
    """Elbow frame sits at the end of the first link, rotated by both joints"""
    q1, q2 = 0.7, 0.2
    poses = forward_kinematics(arm2, [q1, q2])
    assert_allclose(poses[1].translation, [0.5 * np.cos(q1), 0.5 * np.sin(q1), 0.0], atol=1e-15)
    # rotation maps world into link coordinates
    c, s = np.cos(q1 + q2), np.sin(q1 + q2)
    assert_allclose(np.array(poses[1].rotation), [[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]], atol=1e-15)

    tool = end_effector_transform(arm2, [q1, q2], "hand")
    assert_allclose(np.array(tool.rotation), np.array(poses[1].rotation), atol=1e-15)


def test_jacobian_times_velocity(ee_model, rng):
    """Linear rows of the Jacobian map qd to the end-effector velocity"""
    for _ in range(5):
        q = random_configuration(ee_model, rng)
        qd = rng.uniform(-1.0, 1.0, ee_model.nv)
        for ee in ee_model.end_effectors:
            J = end_effector_jacobian(ee_model, q, ee.name)
            assert J.shape == (6, ee_model.nv)
            assert_allclose(J[3:] @ qd, end_effector_velocity(ee_model, q, qd, ee.name), atol=1e-12)


def test_jacobian_matches_position_derivative(ee_model, rng):
    """ṗ = ∂p/∂q · q̇ with q̇ from the configuration rate"""
    q = random_configuration(ee_model, rng)
    qd = rng.uniform(-1.0, 1.0, ee_model.nv)
    qdot = np.array(configuration_rate(ee_model, q, qd))
    for ee in ee_model.end_effectors:
        _, dp_dq = forward_jacobian(lambda x: list(end_effector_position(ee_model, x, ee.name)), q)
        J = end_effector_jacobian(ee_model, q, ee.name)
        assert_allclose(dp_dq @ qdot, J[3:] @ qd, atol=1e-12)


def test_jacobian_angular_rows_pendulum(pendulum):
    J = end_effector_jacobian(pendulum, [0.8], "bob")
    assert_allclose(J[:3, 0], [0.0, 0.0, 1.0], atol=1e-15)
    assert_allclose(J[3:, 0], [-0.5 * np.sin(0.8), 0.5 * np.cos(0.8), 0.0], atol=1e-15)


def test_jacobian_columns_off_path_are_zero(quad18, rng):
    q = random_configuration(quad18, rng)
    J = end_effector_jacobian(quad18, q, "lf_foot")
    off_path = [quad18.dof_offsets[quad18.link_index(name)] for name in ("rf_hip", "lh_upperleg", "rh_lowerleg")]
    assert np.all(J[:, off_path] == 0.0)


def test_feet_kinematics_stacking(quad18, rng):
    q = random_configuration(quad18, rng)
    qd = rng.uniform(-1.0, 1.0, quad18.nv)
    stacked = np.array(feet_kinematics(quad18, q, qd))
    names = [ee.name for ee in quad18.end_effectors]
    assert stacked.shape == (6 * len(names),)

    for k, name in enumerate(names):
        assert_allclose(stacked[3 * k:3 * k + 3], end_effector_position(quad18, q, name), atol=1e-14)
        offset = 3 * len(names) + 3 * k
        assert_allclose(stacked[offset:offset + 3], end_effector_velocity(quad18, q, qd, name), atol=1e-14)

    subset = feet_kinematics(quad18, q, qd, ["rh_foot"])
    assert_allclose(subset[:3], stacked[9:12], atol=1e-14)


def test_configuration_rate_fixed_base(arm6, rng):
    qd = rng.uniform(-1.0, 1.0, 6)
    assert_allclose(configuration_rate(arm6, np.zeros(6), qd), qd)


def test_configuration_rate_floating_base(quad18, rng):
    """Euler rates reproduce the body angular velocity, position rate is R v"""
    q = random_configuration(quad18, rng)
    qd = rng.uniform(-1.0, 1.0, quad18.nv)
    rate = np.array(configuration_rate(quad18, q, qd))

    R = np.array(euler_xyz_matrix(q[:3]))
    assert_allclose(rate[3:6], R @ qd[3:6], atol=1e-14)
    assert_allclose(rate[6:], qd[6:])

    _, dR = forward_jacobian(lambda a: list(np.array(euler_xyz_matrix(a), dtype=object).ravel()), q[:3])
    R_dot = (dR @ rate[:3]).reshape(3, 3)
    assert_allclose(R.T @ R_dot, skew(qd[:3]), atol=1e-12)


def test_unknown_end_effector(quad18):
    q = np.zeros(quad18.nq)
    with pytest.raises(UnknownEndEffector):
        end_effector_position(quad18, q, "nose")
    with pytest.raises(UnknownEndEffector):
        end_effector_jacobian(quad18, q, 9)


def test_kinematics_dimension_checks(quad18):
    with pytest.raises(DimensionError):
        forward_kinematics(quad18, np.zeros(quad18.nq - 1))
    with pytest.raises(DimensionError):
        feet_kinematics(quad18, np.zeros(quad18.nq), np.zeros(3))
