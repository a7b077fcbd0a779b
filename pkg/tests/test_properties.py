"""Property-based checks over random parameters and phase-space points."""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from nhgyro.bracket import GaugeForm, alternating_table, assemble_pi, assemble_pi_gauge, is_alternating
from nhgyro.legendre import PhasePoint, hamiltonian_grad_p, hamiltonian_grad_q, legendre_fwd, legendre_inv
from nhgyro.routh import routh_reduce, theta_dot_recover, cyclic_momentum, toy_blocks
from nhgyro.systems import chaplygin as ch
from nhgyro.systems import suslov as su

coord = st.floats(-2.0, 2.0, allow_nan=False)
angle = st.floats(0.0, 2 * np.pi, allow_nan=False)
polar = st.floats(0.2, np.pi - 0.2, allow_nan=False)
positive = st.floats(0.5, 3.0, allow_nan=False)

triples = st.tuples(coord, coord, coord)


@st.composite
def chaplygin_params(draw):
    return ch.ChaplyginParams(
        I1=draw(positive), I3=draw(positive), m=draw(positive), r_s=draw(st.floats(0.3, 1.5)), B=draw(triples)
    )


@st.composite
def chaplygin_state(draw):
    q = np.array([draw(angle), draw(polar), draw(angle), draw(coord), draw(coord)])
    return PhasePoint(q, np.array(draw(triples)))


@st.composite
def suslov_params(draw):
    I11, I22 = draw(positive), draw(positive)
    # keep the inertia matrix comfortably positive definite
    I13 = draw(st.floats(-0.3, 0.3)) * I11
    I23 = draw(st.floats(-0.3, 0.3)) * I22
    return su.SuslovParams(I11=I11, I22=I22, I33=draw(positive) + 1.0, I13=I13, I23=I23, B=draw(triples))


@settings(deadline=None, max_examples=40)
@given(chaplygin_params(), chaplygin_state())
def test_bracket_antisymmetric_and_affine(p, pp):
    sys = ch.chaplygin_system(p)
    pi = assemble_pi(sys, pp).pi
    assert np.array_equal(pi, -pi.T)
    other = PhasePoint(pp.q, -0.5 * pp.p + 1.0)
    mid = PhasePoint(pp.q, 0.5 * (pp.p + other.p))
    lhs = assemble_pi(sys, mid).pi
    rhs = 0.5 * (assemble_pi(sys, pp).pi + assemble_pi(sys, other).pi)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


@settings(deadline=None, max_examples=40)
@given(chaplygin_params(), chaplygin_state())
def test_legendre_round_trip(p, pp):
    sys = ch.chaplygin_system(p)
    np.testing.assert_allclose(legendre_fwd(sys, legendre_inv(sys, pp)).p, pp.p, atol=1e-11)


@settings(deadline=None, max_examples=40)
@given(chaplygin_params(), chaplygin_state())
def test_closed_form_brackets(p, pp):
    sys = ch.chaplygin_system(p)
    th, ps = pp.q[1], pp.q[2]
    plain = assemble_pi(sys, pp)
    gauged = assemble_pi_gauge(sys, ch.chaplygin_gauge(p), pp)
    for (a, b), val in ch.momentum_brackets(p, th, ps, pp.p).items():
        assert abs(plain.entry(f"p{a}", f"p{b}") - val) < 1e-9
    for (a, b), val in ch.gauged_momentum_brackets(p, th, ps, pp.p).items():
        assert abs(gauged.entry(f"p{a}", f"p{b}") - val) < 1e-9


@settings(deadline=None, max_examples=40)
@given(chaplygin_params(), chaplygin_state(), st.floats(-3.0, 3.0))
def test_any_gauge_preserves_field(p, pp, lam):
    sys = ch.chaplygin_system(p)
    gauge = GaugeForm.constant(alternating_table(3, {(0, 1, 2): lam}))
    dH = np.concatenate([hamiltonian_grad_q(sys, pp), hamiltonian_grad_p(sys, pp)])
    a = assemble_pi(sys, pp).pi @ dH
    b = assemble_pi_gauge(sys, gauge, pp).pi @ dH
    np.testing.assert_allclose(a, b, atol=1e-10 * max(1.0, np.abs(a).max()))


@settings(deadline=None, max_examples=40)
@given(chaplygin_params(), chaplygin_state())
def test_field_reduces_to_kgamma_equations(p, pp):
    from nhgyro.dynamics import xnh_momentum

    sys = ch.chaplygin_system(p)
    xdot = np.concatenate(xnh_momentum(sys, pp))
    kg = ch.kgamma_from_chart(p, pp)
    ref = np.concatenate(ch.chaplygin_reference_rhs(p, kg))
    np.testing.assert_allclose(ch.kgamma_jacobian(p, pp) @ xdot, ref, atol=1e-9 * max(1.0, np.abs(ref).max()))


@settings(deadline=None, max_examples=40)
@given(chaplygin_params(), triples, polar, angle)
def test_omega_k_inverse(p, K, th, ps):
    Gamma = np.array([np.sin(th) * np.sin(ps), np.sin(th) * np.cos(ps), np.cos(th)])
    kg = ch.KGammaPoint(np.array(K), Gamma)
    Om = ch.omega_from_k(p, kg)
    np.testing.assert_allclose(ch.k_from_omega(p, Om, Gamma), kg.K, atol=1e-12)
    assert ch.denominator(p, Gamma) > 0


@settings(deadline=None, max_examples=40)
@given(suslov_params(), angle, polar, angle, coord, coord)
def test_suslov_bracket_closed_form(p, phi, th, psi, p1, p2):
    pp = PhasePoint(np.array([phi, th, psi]), np.array([p1, p2]))
    bm = assemble_pi(su.suslov_system(p), pp)
    assert abs(bm.entry("p1", "p2") - su.momentum_bracket(p, pp.p)) < 1e-9


@settings(deadline=None, max_examples=30)
@given(st.lists(st.floats(-2.0, 2.0), min_size=10, max_size=10))
def test_alternating_tables(vals):
    it = iter(vals)
    values = {(a, b, c): next(it) for a in range(5) for b in range(a + 1, 5) for c in range(b + 1, 5)}
    assert is_alternating(alternating_table(5, values))


@settings(deadline=None, max_examples=40)
@given(st.floats(-2.0, 2.0), st.floats(0.1, 3.0), coord, coord, coord, coord)
def test_routh_level_set(mu, k, q1, q2, v1, v2):
    b = toy_blocks(mu=mu, k=k)
    q, qdot = np.array([q1, q2]), np.array([v1, v2])
    thdot = theta_dot_recover(b, q, qdot)
    np.testing.assert_allclose(cyclic_momentum(b, q, qdot, thdot), [mu], atol=1e-13)
    assert np.linalg.eigvalsh(routh_reduce(b).metric(q)).min() > 0
