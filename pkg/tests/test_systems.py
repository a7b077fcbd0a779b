"""Built-in systems checked against independent closed forms."""
import numpy as np
import pytest

from nhgyro.chart import central_jacobian, frame_at, frame_metric
from nhgyro.errors import DegenerateDenominator, InvalidParams, OffSphere, PoleSingular, SingularChart
from nhgyro.legendre import PhasePoint
from nhgyro.systems import chaplygin as ch
from nhgyro.systems import euler
from nhgyro.systems import suslov as su
from nhgyro.systems.sampling import chaplygin_points, sphere_points, suslov_points


# Euler angles


def test_space_and_body_angular_velocity_related_by_rotation():
    rng = np.random.default_rng(0)
    for _ in range(20):
        ang = rng.uniform(0.2, 2.9, 3)
        rates = rng.normal(size=3)
        R = euler.rotation(*ang)
        np.testing.assert_allclose(R.T @ R, np.eye(3), atol=1e-14)
        np.testing.assert_allclose(
            euler.space_angular_velocity(ang, rates), R @ euler.body_angular_velocity(ang, rates), atol=1e-12
        )
        np.testing.assert_allclose(euler.poisson_vector(ang[1], ang[2]), R.T @ [0.0, 0.0, 1.0], atol=1e-14)


def test_body_rate_matrix_jacobian():
    th, ps = 1.1, 0.4
    fd = central_jacobian(lambda x: euler.body_rate_matrix(x[1], x[2]), np.array([0.0, th, ps]))
    np.testing.assert_allclose(euler.body_rate_matrix_jacobian(th, ps), fd, atol=1e-9)


def test_theta_guard():
    assert euler.theta_guard(1.0) is None
    assert "singular" in euler.theta_guard(1e-8)


# Suslov


def test_suslov_reference_examples():
    p = su.SuslovParams(I11=1.0, I22=3.0, I33=4.0, I13=0.0, I23=0.0, B=(0.0, 0.0, 1.0))
    np.testing.assert_allclose(su.suslov_reference_rhs(p, (1.0, 1.0)), [-1.0, 1.0 / 3.0])
    assert su.suslov_reference_bracket(p, (1.0, 1.0)) == pytest.approx(-1.0 / 3.0)
    assert su.suslov_energy(p, (1.0, 1.0)) == pytest.approx(2.0)


def test_suslov_omega_map(suslov_params):
    p = su.SuslovParams(B=(0.0, 0.0, 0.0))
    assert su.suslov_omega_map(p, PhasePoint(np.zeros(3) + 1.0, np.array([2.0, 0.0])))[0] == pytest.approx(1.0)
    Om = np.array([0.3, -1.7])
    pp = PhasePoint(np.array([0.0, 1.0, 0.0]), su.suslov_momenta_from_omega(suslov_params, Om))
    np.testing.assert_allclose(su.suslov_omega_map(suslov_params, pp), Om, atol=1e-15)


def test_suslov_dual_basis(suslov, suslov_params):
    for pp in suslov_points(10, seed=1):
        np.testing.assert_allclose(su.dual_basis(suslov_params, pp.q) @ frame_at(suslov, pp.q), np.eye(3), atol=1e-12)


def test_suslov_frame_spans_constraint(suslov, suslov_params):
    for pp in suslov_points(10, seed=2):
        rho = frame_at(suslov, pp.q)
        J = euler.body_rate_matrix(pp.q[1], pp.q[2])
        # D-vectors have Omega_3 = 0
        np.testing.assert_allclose((J @ rho[:, :2])[2], 0.0, atol=1e-14)
        v = su.quasi_velocities_from_omega(suslov_params, J @ rho[:, 2], pp.q[1])
        np.testing.assert_allclose(v, [0.0, 0.0, 1.0], atol=1e-12)


def test_suslov_eta_transverse(suslov, suslov_params):
    from nhgyro.chart import eta_frame

    for pp in suslov_points(5, seed=3):
        assert eta_frame(suslov, pp.q)[2] == pytest.approx(su.eta_perp_coefficient(suslov_params, pp.q[1]), abs=1e-12)


def test_suslov_multiplier_form(suslov_params):
    """Euler-Poincare with a reaction torque along E_3 reproduces the reduced equations."""
    Ii = np.linalg.inv(suslov_params.inertia)
    E3 = np.array([0.0, 0.0, 1.0])
    rng = np.random.default_rng(4)
    for _ in range(20):
        Om = np.append(rng.uniform(-2, 2, 2), 0.0)
        M = suslov_params.inertia @ Om
        torque = np.cross(M + suslov_params.Bvec, Om)
        lam = -(Ii @ E3) @ torque / ((Ii @ E3) @ E3)
        Omdot = Ii @ (torque + lam * E3)
        assert abs(Omdot[2]) < 1e-14
        # the reduced momenta are M_1, M_2 on the constraint; compare their rates
        Mdot = torque + lam * E3
        Mref = np.diag([suslov_params.I11, suslov_params.I22]) @ su.suslov_reference_rhs(suslov_params, Om[:2])
        np.testing.assert_allclose(Mdot[:2] - lam * 0.0, Mref + (np.array([suslov_params.I13, suslov_params.I23]) * Omdot[2]), atol=1e-12)


def test_suslov_params_validation():
    with pytest.raises(InvalidParams):
        su.SuslovParams(I13=5.0)
    with pytest.raises(InvalidParams):
        su.SuslovParams(B=(1.0, 2.0))
    with pytest.raises(InvalidParams):
        su.suslov_system("not params")


# Chaplygin sphere


def test_chaplygin_dual_basis(chaplygin, chap_params):
    for pp in chaplygin_points(10, seed=5):
        rho = frame_at(chaplygin, pp.q)
        np.testing.assert_allclose(ch.dual_basis(chap_params, pp.q), np.linalg.inv(rho), atol=1e-12)


def test_rolling_without_slipping(chaplygin, chap_params):
    rng = np.random.default_rng(6)
    for pp in chaplygin_points(10, seed=6):
        qdot = frame_at(chaplygin, pp.q)[:, :3] @ rng.normal(size=3)
        omega = euler.space_angular_velocity(pp.q[:3], qdot[:3])
        np.testing.assert_allclose(qdot[3:], chap_params.r_s * np.array([omega[1], -omega[0]]), atol=1e-13)
        np.testing.assert_allclose((ch.dual_basis(chap_params, pp.q) @ qdot)[3:], 0.0, atol=1e-12)


def test_chaplygin_closed_form_frame_data(chaplygin, chap_params):
    from nhgyro.chart import eta_frame, structure_functions

    for pp in chaplygin_points(10, seed=7):
        th, ps = pp.q[1], pp.q[2]
        np.testing.assert_allclose(frame_metric(chaplygin, pp.q)[:3, :3], ch.metric_block(chap_params, th), atol=1e-12)
        np.testing.assert_allclose(eta_frame(chaplygin, pp.q), ch.eta_components(chap_params, th, ps), atol=1e-12)
        np.testing.assert_allclose(
            structure_functions(chaplygin, pp.q).C[:, :3, :3], ch.structure_table(chap_params, th), atol=1e-11
        )
        np.testing.assert_allclose(
            ch.inverse_metric_block(chap_params, th), np.linalg.inv(ch.metric_block(chap_params, th)), atol=1e-12
        )


def test_gauge_coefficient(chaplygin, chap_params):
    assert ch.gauge_coefficient(chap_params, np.pi / 2) == pytest.approx(-chap_params.mr2)
    for pp in chaplygin_points(10, seed=8):
        lam = ch.gauge_coefficient(chap_params, pp.q[1])
        assert ch.gauge_coefficient_from_metric(chaplygin, pp.q) == pytest.approx(lam, abs=1e-10)
        vol = ch.cartan_volume_on_frame(chaplygin, pp.q)
        assert chap_params.mr2 * vol[0, 1, 2] == pytest.approx(lam, abs=1e-12)
        assert ch.chaplygin_gauge(chap_params).at(pp.q)[2, 0, 1] == pytest.approx(lam)


def test_kgamma_at_equator(chap_params):
    pp = PhasePoint(np.array([0.3, np.pi / 2, 0.0, 1.0, -1.0]), np.array([0.5, 0.7, 0.9]))
    kg = ch.kgamma_from_chart(chap_params, pp)
    np.testing.assert_allclose(kg.Gamma, [0.0, 1.0, 0.0], atol=1e-15)
    assert kg.K[2] == pytest.approx(0.9 - chap_params.B[2])


def test_kgamma_jacobian(chap_params):
    for pp in chaplygin_points(5, seed=9):
        fd = central_jacobian(lambda x: ch.kgamma_from_chart(chap_params, PhasePoint(x[:5], x[5:])).flat(), pp.flat())
        np.testing.assert_allclose(ch.kgamma_jacobian(chap_params, pp), fd, atol=1e-8)


def test_chart_from_kgamma_round_trip(chap_params):
    for kg in sphere_points(100, seed=10):
        back = ch.kgamma_from_chart(chap_params, ch.chart_from_kgamma(chap_params, kg))
        np.testing.assert_allclose(back.flat(), kg.flat(), atol=1e-12)


def test_lift_is_invariant(chap_params, chaplygin):
    kg = sphere_points(1, seed=11)[0]
    a, b = ch.chart_from_kgamma(chap_params, kg, phi=0.0), ch.chart_from_kgamma(chap_params, kg, phi=1.0)
    np.testing.assert_allclose(ch.kgamma_from_chart(chap_params, b).flat(), kg.flat(), atol=1e-12)
    from nhgyro.legendre import constrained_hamiltonian

    assert constrained_hamiltonian(chaplygin, a) == pytest.approx(constrained_hamiltonian(chaplygin, b), abs=1e-13)


def test_chart_from_kgamma_errors(chap_params):
    with pytest.raises(OffSphere):
        ch.chart_from_kgamma(chap_params, ch.KGammaPoint(np.zeros(3), np.array([0.0, 0.0, 2.0])))
    with pytest.raises(PoleSingular):
        ch.chart_from_kgamma(chap_params, ch.KGammaPoint(np.zeros(3), np.array([0.0, 0.0, 1.0])))
    with pytest.raises(SingularChart):
        ch.kgamma_from_chart(chap_params, PhasePoint(np.zeros(5), np.zeros(3)))


def test_omega_k_round_trip(chap_params):
    for kg in sphere_points(20, seed=12):
        Om = ch.omega_from_k(chap_params, kg)
        np.testing.assert_allclose(ch.k_from_omega(chap_params, Om, kg.Gamma), kg.K, atol=1e-12)


def test_zero_mass_limit():
    p = ch.ChaplyginParams(m=0.0)
    kg = ch.KGammaPoint(np.array([1.0, 2.0, 3.0]), np.array([0.0, 0.6, 0.8]))
    np.testing.assert_allclose(ch.omega_from_k(p, kg), np.linalg.solve(p.inertia, kg.K))
    assert ch.measure_density(p, kg.Gamma) == 1.0
    with pytest.raises(InvalidParams):
        ch.chaplygin_system(p)


def test_chaplygin_params_validation():
    with pytest.raises(InvalidParams):
        ch.ChaplyginParams(I1=-1.0)
    with pytest.raises(InvalidParams):
        ch.ChaplyginParams(I2=3.0)
    with pytest.raises(InvalidParams):
        ch.ChaplyginParams(m=-1.0)


def test_degenerate_denominator():
    p = ch.ChaplyginParams()
    with pytest.raises(DegenerateDenominator):
        ch.measure_density(p, np.array([0.0, 0.0, 10.0]))


def test_reference_bracket_pattern(chap_params):
    kg = sphere_points(1, seed=13)[0]
    pi = ch.chaplygin_reference_bracket(chap_params, kg)
    G = kg.Gamma
    assert pi[0, 4] == pytest.approx(-G[2])
    assert pi[0, 3] == 0.0 and pi[3, 4] == 0.0
    np.testing.assert_array_equal(pi, -pi.T)


def test_reduced_equations_from_bracket(chap_params):
    for kg in sphere_points(20, seed=14):
        dH = central_jacobian(lambda x: np.array(ch.energy(chap_params, ch.KGammaPoint.from_flat(x))), kg.flat())
        rhs = np.concatenate(ch.chaplygin_reference_rhs(chap_params, kg))
        np.testing.assert_allclose(ch.chaplygin_reference_bracket(chap_params, kg) @ dH, rhs, atol=1e-8)
        F1_grad = np.concatenate([2.0 * (kg.K + chap_params.Bvec), np.zeros(3)])
        assert abs(F1_grad @ rhs) < 1e-12
        G_grad = np.concatenate([np.zeros(3), 2.0 * kg.Gamma])
        assert abs(G_grad @ rhs) < 1e-12
