"""Routh reduction: closed forms on the toy system and consistency checks."""
from dataclasses import replace

import numpy as np
import pytest

from nhgyro.chart import central_jacobian
from nhgyro.dynamics import integrate, momentum_field
from nhgyro.errors import InvalidParams, LinearSolveFailure
from nhgyro.routh import (
    ExtendedBlocks,
    check_blocks,
    cyclic_momentum,
    extended_field,
    extended_system,
    level_set_states,
    reduced_field,
    reduced_system,
    routh_reduce,
    theta_dot_recover,
    toy_blocks,
)


@pytest.fixture
def toy():
    return toy_blocks(mu=1.0, k=1.0)


def test_uncoupled_reduction_is_trivial(toy):
    b = replace(toy, Gqth=lambda q: np.zeros((2, 1)))
    t = routh_reduce(b)
    q = np.array([0.4, -0.3])
    np.testing.assert_array_equal(t.metric(q), np.eye(2))
    np.testing.assert_array_equal(t.eta(q), np.zeros(2))
    assert t.potential(q) == pytest.approx(0.5 * q @ q + 0.25)


def test_zero_momentum_level(toy):
    t = routh_reduce(replace(toy, mu=np.array([0.0])))
    q = np.array([0.4, -0.3])
    np.testing.assert_array_equal(t.eta(q), np.zeros(2))
    assert t.potential(q) == pytest.approx(0.5 * q @ q)


def test_toy_closed_forms(toy):
    t = routh_reduce(toy)
    for q in np.random.default_rng(0).uniform(-2, 2, (20, 2)):
        s = np.sin(q[0])
        np.testing.assert_allclose(t.metric(q), np.diag([1.0 - 0.5 * s**2, 1.0]), atol=1e-15)
        np.testing.assert_allclose(t.eta(q), [0.5 * s, 0.0], atol=1e-15)
        assert t.potential(q) == pytest.approx(0.5 * q @ q + 0.25, abs=1e-15)
        assert np.linalg.eigvalsh(t.metric(q)).min() > 0


def test_cyclic_velocity_recovery(toy):
    q = np.array([0.9, 0.1])
    qdot = np.array([1.0, 0.0])
    thdot = theta_dot_recover(toy, q, qdot)
    assert thdot[0] == pytest.approx((1.0 - np.sin(q[0])) / 2)
    np.testing.assert_allclose(cyclic_momentum(toy, q, qdot, thdot), toy.mu, atol=1e-15)


def test_reduced_jacobians_match_fd(toy):
    sys = reduced_system(toy)
    q = np.array([0.7, -0.4])
    np.testing.assert_allclose(sys.metric_jacobian(q), central_jacobian(sys.metric_coords, q), atol=1e-9)
    np.testing.assert_allclose(sys.eta_jacobian(q), central_jacobian(sys.eta_coords, q), atol=1e-9)
    np.testing.assert_allclose(sys.potential_grad(q), central_jacobian(lambda x: np.array(sys.potential(x)), q), atol=1e-9)


def test_fast_fields_match_charted(toy):
    x_full, x_red = level_set_states(toy, [0.7, -0.3], [0.4, -0.2])
    np.testing.assert_allclose(reduced_field(toy)(x_red), momentum_field(reduced_system(toy))(x_red), atol=1e-14)
    np.testing.assert_allclose(extended_field(toy)(x_full), momentum_field(extended_system(toy))(x_full), atol=1e-14)


def test_level_set_and_short_roundtrip(toy):
    x_full, x_red = level_set_states(toy, [0.7, -0.3], [0.4, -0.2], theta0=0.5)
    assert x_full[2] == 0.5 and x_full[-1] == pytest.approx(1.0)
    full = integrate(extended_field(toy), x_full, 0.0, 0.5, dt=1e-3)
    red = integrate(reduced_field(toy), x_red, 0.0, 0.5, dt=1e-3)
    np.testing.assert_allclose(full.final[:2], red.final[:2], atol=1e-10)
    # p_theta is conserved along the unreduced flow
    np.testing.assert_allclose(full.states[:, -1], 1.0, atol=1e-12)


def test_block_validation(toy):
    check_blocks(toy, [np.zeros(2), np.ones(2)])
    bad = replace(toy, Gthth=lambda q: np.array([[0.4]]))
    with pytest.raises(InvalidParams):
        check_blocks(bad, [np.array([np.pi / 2, 0.0])])
    with pytest.raises(InvalidParams):
        check_blocks(replace(toy, Gthth=lambda q: np.array([[-1.0]])), [np.zeros(2)])
    with pytest.raises(LinearSolveFailure):
        routh_reduce(replace(toy, Gthth=lambda q: np.array([[0.0]]))).eta(np.zeros(2))


def test_constructor_checks(toy):
    with pytest.raises(InvalidParams):
        replace(toy, mu=np.array([1.0, 2.0]))
    with pytest.raises(InvalidParams):
        reduced_field(replace(toy, Vtilde_grad=None))
