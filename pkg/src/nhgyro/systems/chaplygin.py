"""Chaplygin sphere with gyrostat, axisymmetric case ``I_1 = I_2``.

Chart coordinates are ``(phi, theta, psi, x, y)``.  The first three frame
fields span the rolling distribution; all five are invariant under the SE(2)
action, so brackets of the quasi-momenta depend on ``(theta, psi)`` only and
push down to the reduced variables ``(K, Gamma)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..bracket import GaugeForm, alternating_table
from ..chart import ChartedSystem, frame_metric, structure_functions
from ..errors import DegenerateDenominator, InvalidParams, OffSphere, PoleSingular, SingularChart
from ..legendre import PhasePoint
from . import euler

SPHERE_TOL = 1e-8
POLE_MARGIN = 1e-6


@dataclass(frozen=True)
class ChaplyginParams:
    I1: float = 2.0
    I3: float = 4.0
    m: float = 1.0
    r_s: float = 1.0
    B: tuple = (0.1, 0.2, 0.3)
    I2: Optional[float] = None  # reserved; only I2 == I1 is supported

    def __post_init__(self):
        object.__setattr__(self, "B", tuple(float(b) for b in self.B))
        if len(self.B) != 3:
            raise InvalidParams("B must have three components")
        if not (self.I1 > 0 and self.I3 > 0):
            raise InvalidParams("principal inertias must be positive")
        if not (self.m >= 0 and self.r_s >= 0):
            raise InvalidParams("mass and radius must be non-negative")
        if self.I2 is not None and self.I2 != self.I1:
            raise InvalidParams("only the axisymmetric case I2 == I1 is implemented")

    @property
    def inertia(self) -> np.ndarray:
        return np.diag([self.I1, self.I1, self.I3])

    @property
    def mr2(self) -> float:
        return self.m * self.r_s**2

    @property
    def A(self) -> np.ndarray:
        return np.linalg.inv(self.inertia + self.mr2 * np.eye(3))

    @property
    def Bvec(self) -> np.ndarray:
        return np.array(self.B)


@dataclass(frozen=True)
class KGammaPoint:
    K: np.ndarray
    Gamma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "K", np.asarray(self.K, dtype=float))
        object.__setattr__(self, "Gamma", np.asarray(self.Gamma, dtype=float))

    def flat(self) -> np.ndarray:
        return np.concatenate([self.K, self.Gamma])

    @classmethod
    def from_flat(cls, x) -> "KGammaPoint":
        x = np.asarray(x, dtype=float)
        return cls(x[:3], x[3:6])


KGAMMA_LABELS = ("K1", "K2", "K3", "Gamma1", "Gamma2", "Gamma3")


# ---------------------------------------------------------------------------
# chart data


def f_theta(p: ChaplyginParams, theta):
    return p.I1 * np.sin(theta) ** 2 + p.I3 * np.cos(theta) ** 2


def G_theta(p: ChaplyginParams, theta):
    return p.I1 * p.I3 + p.I1 * p.mr2 * np.sin(theta) ** 2 + p.I3 * p.mr2 * np.cos(theta) ** 2


def _frame(p: ChaplyginParams, q) -> np.ndarray:
    ph, th, _, _, _ = q
    sf, cf = np.sin(ph), np.cos(ph)
    st, ct = np.sin(th), np.cos(th)
    r, mr2 = p.r_s, p.mr2
    e1 = [1.0, 0.0, 0.0, 0.0, 0.0]
    e2 = [0.0, 1.0, 0.0, r * sf, -r * cf]
    e3 = [0.0, 0.0, 1.0, -r * st * cf, -r * st * sf]
    e4 = [0.0, mr2 * st / p.I1, 0.0, -r * st * sf, r * st * cf]
    e5 = [-mr2 * ct / p.I1, 0.0, mr2 * f_theta(p, th) / (p.I1 * p.I3), r * st * cf, r * st * sf]
    return np.column_stack([e1, e2, e3, e4, e5])


def _frame_jacobian(p: ChaplyginParams, q) -> np.ndarray:
    ph, th, _, _, _ = q
    sf, cf = np.sin(ph), np.cos(ph)
    st, ct = np.sin(th), np.cos(th)
    r, mr2 = p.r_s, p.mr2
    df = 2.0 * (p.I1 - p.I3) * st * ct
    D = np.zeros((5, 5, 5))
    D[:, 1, 0] = [0.0, 0.0, 0.0, r * cf, r * sf]
    D[:, 2, 0] = [0.0, 0.0, 0.0, r * st * sf, -r * st * cf]
    D[:, 2, 1] = [0.0, 0.0, 0.0, -r * ct * cf, -r * ct * sf]
    D[:, 3, 0] = [0.0, 0.0, 0.0, -r * st * cf, -r * st * sf]
    D[:, 3, 1] = [0.0, mr2 * ct / p.I1, 0.0, -r * ct * sf, r * ct * cf]
    D[:, 4, 0] = [0.0, 0.0, 0.0, -r * st * sf, r * st * cf]
    D[:, 4, 1] = [mr2 * st / p.I1, 0.0, mr2 * df / (p.I1 * p.I3), r * ct * cf, r * ct * sf]
    return D


def _metric(p: ChaplyginParams, q) -> np.ndarray:
    J = euler.body_rate_matrix(q[1], q[2])
    g = np.zeros((5, 5))
    g[:3, :3] = J.T @ p.inertia @ J
    g[3, 3] = g[4, 4] = p.m
    return g


def _metric_jacobian(p: ChaplyginParams, q) -> np.ndarray:
    J = euler.body_rate_matrix(q[1], q[2])
    dJ = euler.body_rate_matrix_jacobian(q[1], q[2])
    t = np.einsum("lik,lm,mj->ijk", dJ, p.inertia, J)
    out = np.zeros((5, 5, 5))
    out[:3, :3, :3] = t + t.transpose(1, 0, 2)
    return out


def _eta(p: ChaplyginParams, q) -> np.ndarray:
    out = np.zeros(5)
    out[:3] = euler.body_rate_matrix(q[1], q[2]).T @ p.Bvec
    return out


def _eta_jacobian(p: ChaplyginParams, q) -> np.ndarray:
    out = np.zeros((5, 5))
    out[:3, :3] = np.einsum("lik,l->ik", euler.body_rate_matrix_jacobian(q[1], q[2]), p.Bvec)
    return out


def _hamiltonian_grad_q(p: ChaplyginParams, q, mom) -> np.ndarray:
    th, ps = q[1], q[2]
    st, ct = np.sin(th), np.cos(th)
    sp, cp = np.sin(ps), np.cos(ps)
    B1, B2, B3 = p.B
    g = metric_block(p, th)
    w = np.asarray(mom, dtype=float) - eta_parallel(p, th, ps)
    v = np.linalg.solve(g, w)
    dg_th = np.array(
        [
            [2.0 * (p.I1 - p.I3) * st * ct, 0.0, -p.I3 * st],
            [0.0, 0.0, 0.0],
            [-p.I3 * st, 0.0, 2.0 * p.mr2 * st * ct],
        ]
    )
    deta_th = np.array([B1 * ct * sp + B2 * ct * cp - B3 * st, 0.0, 0.0])
    deta_ps = np.array([B1 * st * cp - B2 * st * sp, -B1 * sp - B2 * cp, 0.0])
    out = np.zeros(5)
    out[1] = -0.5 * v @ dg_th @ v - deta_th @ v
    out[2] = -deta_ps @ v
    return out


def chaplygin_system(p: ChaplyginParams = ChaplyginParams()) -> ChartedSystem:
    """``n = 5``, ``r = 3`` system on ``(phi, theta, psi, x, y)``."""
    if not isinstance(p, ChaplyginParams):
        raise InvalidParams("expected ChaplyginParams")
    if not (p.m > 0 and p.r_s > 0):
        raise InvalidParams("the rolling system needs m > 0 and r_s > 0")
    eigs = np.linalg.eigvalsh(p.A)
    if eigs.max() >= 1.0 / p.mr2:
        raise InvalidParams("A must have eigenvalues below 1/(m r_s^2)")

    def kg(q, mom):
        return kgamma_from_chart(p, PhasePoint(q, mom))

    return ChartedSystem(
        n=5,
        r=3,
        frame=lambda q: _frame(p, q),
        frame_jacobian=lambda q: _frame_jacobian(p, q),
        metric_coords=lambda q: _metric(p, q),
        metric_jacobian=lambda q: _metric_jacobian(p, q),
        eta_coords=lambda q: _eta(p, q),
        eta_jacobian=lambda q: _eta_jacobian(p, q),
        domain_guard=lambda q: euler.theta_guard(q[1]),
        hamiltonian_grad_q=lambda q, mom: _hamiltonian_grad_q(p, q, mom),
        integrals={
            "F1": lambda q, mom: first_integrals(p, kg(q, mom))[0],
            "F2": lambda q, mom: first_integrals(p, kg(q, mom))[1],
        },
        diagnostics={"measure_density": lambda q, mom: measure_density(p, kg(q, mom).Gamma)},
        name="chaplygin-sphere",
    )


# ---------------------------------------------------------------------------
# closed forms in the adapted frame, used as oracles


def metric_block(p: ChaplyginParams, theta) -> np.ndarray:
    """``g_ab`` for ``a, b <= 3``, read off the constrained Lagrangian."""
    st, ct = np.sin(theta), np.cos(theta)
    return np.array(
        [
            [f_theta(p, theta), 0.0, p.I3 * ct],
            [0.0, p.I1 + p.mr2, 0.0],
            [p.I3 * ct, 0.0, p.I3 + p.mr2 * st**2],
        ]
    )


def inverse_metric_block(p: ChaplyginParams, theta) -> np.ndarray:
    st, ct = np.sin(theta), np.cos(theta)
    G = G_theta(p, theta)
    g11 = (p.I3 + p.mr2 * st**2) / (G * st**2)
    g33 = f_theta(p, theta) / (G * st**2)
    g13 = -p.I3 * ct / (G * st**2)
    return np.array([[g11, 0.0, g13], [0.0, 1.0 / (p.I1 + p.mr2), 0.0], [g13, 0.0, g33]])


def eta_components(p: ChaplyginParams, theta, psi) -> np.ndarray:
    """All five frame components ``eta_j``."""
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(psi), np.cos(psi)
    B1, B2, B3 = p.B
    mr2 = p.mr2
    return np.array(
        [
            B1 * st * sp + B2 * st * cp + B3 * ct,
            B1 * cp - B2 * sp,
            B3,
            mr2 * st / p.I1 * (B1 * cp - B2 * sp),
            mr2 * st**2 / (p.I1 * p.I3) * (p.I1 * B3 - p.I3 * ct / st * (B1 * sp + B2 * cp)),
        ]
    )


def eta_parallel(p: ChaplyginParams, theta, psi) -> np.ndarray:
    return eta_components(p, theta, psi)[:3]


def structure_table(p: ChaplyginParams, theta) -> np.ndarray:
    """``C[j, a, b] = C^j_ab`` for ``a, b <= 3`` (0-based indices)."""
    st, ct = np.sin(theta), np.cos(theta)
    G = G_theta(p, theta)
    f = f_theta(p, theta)
    mr2 = p.mr2
    C = np.zeros((5, 3, 3))

    def put(j, a, b, val):
        C[j - 1, a - 1, b - 1] = val
        C[j - 1, b - 1, a - 1] = -val

    put(1, 1, 2, mr2 * p.I3 * ct / (G * st))
    put(3, 1, 2, -mr2 * f / (G * st))
    put(5, 1, 2, p.I1 * p.I3 / (G * st))
    put(2, 1, 3, mr2 * st / (p.I1 + mr2))
    put(4, 1, 3, -p.I1 / (p.I1 + mr2))
    put(1, 2, 3, -mr2 * p.I3 * ct**2 / (G * st))
    put(3, 2, 3, mr2 * ct * f / (G * st))
    put(5, 2, 3, -p.I1 * p.I3 * ct / (G * st))
    return C


def dual_basis(p: ChaplyginParams, q) -> np.ndarray:
    """Rows are ``e^1 .. e^5`` in ``(dphi, dtheta, dpsi, dx, dy)``."""
    ph, th = q[0], q[1]
    sf, cf = np.sin(ph), np.cos(ph)
    st, ct = np.sin(th), np.cos(th)
    r, m, mr2 = p.r_s, p.m, p.mr2
    G = G_theta(p, th)
    f = f_theta(p, th)
    k1 = mr2 * p.I3 * ct / G
    return np.array(
        [
            [1.0, 0.0, k1, k1 * cf / (r * st), k1 * sf / (r * st)],
            np.array([0.0, p.I1, 0.0, m * r * sf, -m * r * cf]) / (p.I1 + mr2),
            np.array([0.0, 0.0, p.I1 * p.I3 * st, -m * r * f * cf, -m * r * f * sf]) / (G * st),
            p.I1 / ((p.I1 + mr2) * st) * np.array([0.0, 1.0, 0.0, -sf / r, cf / r]),
            p.I1 * p.I3 / (r * G * st) * np.array([0.0, 0.0, r * st, cf, sf]),
        ]
    )


def momenta_from_velocities(p: ChaplyginParams, theta, psi, v) -> np.ndarray:
    v1, v2, v3 = v
    ct, st = np.cos(theta), np.sin(theta)
    eta = eta_parallel(p, theta, psi)
    return np.array(
        [
            f_theta(p, theta) * v1 + p.I3 * ct * v3 + eta[0],
            (p.I1 + p.mr2) * v2 + eta[1],
            p.I3 * ct * v1 + (p.I3 + p.mr2 * st**2) * v3 + eta[2],
        ]
    )


def constrained_lagrangian_closed(p: ChaplyginParams, theta, psi, v) -> float:
    v1, v2, v3 = v
    ct, st = np.cos(theta), np.sin(theta)
    eta = eta_parallel(p, theta, psi)
    return float(
        0.5 * f_theta(p, theta) * v1**2
        + 0.5 * (p.I1 + p.mr2) * v2**2
        + 0.5 * (p.I3 + p.mr2 * st**2) * v3**2
        + p.I3 * ct * v1 * v3
        + eta @ np.asarray(v)
    )


def quasi_velocities_from_omega(theta, psi, Omega) -> np.ndarray:
    O1, O2, O3 = Omega
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(psi), np.cos(psi)
    return np.array(
        [
            (sp * O1 + cp * O2) / st,
            cp * O1 - sp * O2,
            O3 - ct / st * (sp * O1 + cp * O2),
        ]
    )


def momentum_brackets(p: ChaplyginParams, theta, psi, mom) -> dict:
    """Ungauged ``{p_a, p_b}`` for ``(a, b)`` in ``(1,2), (1,3), (2,3)``."""
    st, ct = np.sin(theta), np.cos(theta)
    G = G_theta(p, theta)
    f = f_theta(p, theta)
    mr2 = p.mr2
    p1, p2, p3 = mom
    eta = eta_components(p, theta, psi)
    return {
        (1, 2): -mr2 * p.I3 * ct / (G * st) * p1 + mr2 * f / (G * st) * p3 - p.I1 * p.I3 / (G * st) * eta[4],
        (1, 3): -mr2 * st / (p.I1 + mr2) * p2 + p.I1 / (p.I1 + mr2) * eta[3],
        (2, 3): mr2 * p.I3 * ct**2 / (G * st) * p1 - mr2 * ct * f / (G * st) * p3
        + p.I1 * p.I3 * ct / (G * st) * eta[4],
    }


def gauged_momentum_brackets(p: ChaplyginParams, theta, psi, mom) -> dict:
    """``{p_a, p_b}`` after the gauge transformation by the Cartan 3-form."""
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(psi), np.cos(psi)
    G = G_theta(p, theta)
    mr2 = p.mr2
    p1, _, p3 = mom
    B1, B2, B3 = p.B
    p23 = mr2 * st / G * (
        -(p.I3 + mr2) * p1
        + (p.I3 - p.I1) * ct * p3
        + (p.I3 + mr2) * st * (sp * B1 + cp * B2)
        + (p.I1 + mr2) * ct * B3
    )
    return {(1, 2): 0.0, (1, 3): 0.0, (2, 3): p23}


# ---------------------------------------------------------------------------
# gauge form


def gauge_coefficient(p: ChaplyginParams, theta) -> float:
    """``lambda_123 = -m r^2 sin(theta)``."""
    return -p.mr2 * np.sin(theta)


def chaplygin_gauge(p: ChaplyginParams = ChaplyginParams()) -> GaugeForm:
    def coeffs(q):
        return alternating_table(3, {(0, 1, 2): gauge_coefficient(p, q[1])})

    return GaugeForm(coeffs, 3)


def gauge_coefficient_from_metric(sys: ChartedSystem, q) -> float:
    """``g([e_1, e_2], e_3)`` computed from the numerical structure functions."""
    C12 = structure_functions(sys, q).C[:, 0, 1]
    return float(C12 @ frame_metric(sys, q)[:, 2])


def cartan_volume_on_frame(sys: ChartedSystem, q) -> np.ndarray:
    """``nu(e_a, e_b, e_c)`` for ``nu = -sin(theta) dphi ^ dtheta ^ dpsi``."""
    rho = np.asarray(sys.frame(np.asarray(q, dtype=float)))[:3, :3]
    out = np.zeros((3, 3, 3))
    for a in range(3):
        for b in range(3):
            for c in range(3):
                out[a, b, c] = -np.sin(q[1]) * np.linalg.det(rho[:, [a, b, c]])
    return out


# ---------------------------------------------------------------------------
# reduced variables


def _k_matrix(theta, psi) -> np.ndarray:
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(psi), np.cos(psi)
    return np.array(
        [
            [sp / st, cp, -ct * sp / st],
            [cp / st, -sp, -ct * cp / st],
            [0.0, 0.0, 1.0],
        ]
    )


def kgamma_from_chart(p: ChaplyginParams, pp: PhasePoint) -> KGammaPoint:
    th, ps = pp.q[1], pp.q[2]
    reason = euler.theta_guard(th)
    if reason:
        raise SingularChart(reason)
    K = _k_matrix(th, ps) @ pp.p - p.Bvec
    return KGammaPoint(K, euler.poisson_vector(th, ps))


def kgamma_jacobian(p: ChaplyginParams, pp: PhasePoint) -> np.ndarray:
    """``d(K, Gamma) / d(q, p)``, a ``6 x 8`` matrix."""
    th, ps = pp.q[1], pp.q[2]
    p1, p2, p3 = pp.p
    st, ct = np.sin(th), np.cos(th)
    sp, cp = np.sin(ps), np.cos(ps)
    J = np.zeros((6, 8))
    J[0, 1] = -sp * ct / st**2 * p1 + sp / st**2 * p3
    J[0, 2] = cp / st * p1 - sp * p2 - ct * cp / st * p3
    J[1, 1] = -cp * ct / st**2 * p1 + cp / st**2 * p3
    J[1, 2] = -sp / st * p1 - cp * p2 + ct * sp / st * p3
    J[:3, 5:] = _k_matrix(th, ps)
    J[3, 1], J[3, 2] = ct * sp, st * cp
    J[4, 1], J[4, 2] = ct * cp, -st * sp
    J[5, 1] = -st
    return J


def chart_from_kgamma(p: ChaplyginParams, kg: KGammaPoint, phi: float = 0.0) -> PhasePoint:
    Gam = kg.Gamma
    if abs(np.linalg.norm(Gam) - 1.0) > SPHERE_TOL:
        raise OffSphere(f"|Gamma| = {np.linalg.norm(Gam)!r}")
    if abs(Gam[2]) >= 1.0 - POLE_MARGIN:
        raise PoleSingular(f"Gamma_3 = {Gam[2]!r} at a pole of the chart")
    th = np.arccos(Gam[2])
    ps = np.arctan2(Gam[0], Gam[1])
    mom = np.linalg.solve(_k_matrix(th, ps), kg.K + p.Bvec)
    return PhasePoint(np.array([phi, th, ps, 0.0, 0.0]), mom)


def denominator(p: ChaplyginParams, Gamma) -> float:
    Gamma = np.asarray(Gamma, dtype=float)
    return float(1.0 - p.mr2 * (p.A @ Gamma) @ Gamma)


def _checked_denominator(p: ChaplyginParams, Gamma) -> float:
    d = denominator(p, Gamma)
    if not d > 0:
        raise DegenerateDenominator(f"1 - m r^2 (A Gamma).Gamma = {d!r}")
    return d


def omega_from_k(p: ChaplyginParams, kg: KGammaPoint) -> np.ndarray:
    d = _checked_denominator(p, kg.Gamma)
    AK = p.A @ kg.K
    AG = p.A @ kg.Gamma
    # Omega.Gamma = (AK).Gamma / d, and (I + m r^2) Omega = K + m r^2 (Omega.Gamma) Gamma
    return AK + p.mr2 * (AK @ kg.Gamma) / d * AG


def k_from_omega(p: ChaplyginParams, Omega, Gamma) -> np.ndarray:
    Omega = np.asarray(Omega, dtype=float)
    Gamma = np.asarray(Gamma, dtype=float)
    return p.inertia @ Omega + p.mr2 * np.cross(Gamma, np.cross(Omega, Gamma))


def _hat(v) -> np.ndarray:
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


def chaplygin_reference_bracket(p: ChaplyginParams, kg: KGammaPoint) -> np.ndarray:
    """6 x 6 bracket matrix ordered ``(K_1..K_3, Gamma_1..Gamma_3)``."""
    Om = omega_from_k(p, kg)
    G = kg.Gamma
    X = kg.K - p.mr2 * (Om @ G) * G + p.Bvec
    pi = np.zeros((6, 6))
    pi[:3, :3] = _hat(X)
    pi[:3, 3:] = _hat(G)
    pi[3:, :3] = _hat(G)
    return pi


def chaplygin_reference_rhs(p: ChaplyginParams, kg: KGammaPoint):
    Om = omega_from_k(p, kg)
    return np.cross(kg.K + p.Bvec, Om), np.cross(kg.Gamma, Om)


def energy(p: ChaplyginParams, kg: KGammaPoint) -> float:
    return float(0.5 * kg.K @ omega_from_k(p, kg))


def first_integrals(p: ChaplyginParams, kg: KGammaPoint):
    KB = kg.K + p.Bvec
    return float(KB @ KB), float(KB @ kg.Gamma)


def casimir_gradients(p: ChaplyginParams, kg: KGammaPoint):
    """Gradients of ``|Gamma|^2`` and ``F_2`` in ``(K, Gamma)``."""
    z = np.zeros(3)
    return np.concatenate([z, 2.0 * kg.Gamma]), np.concatenate([kg.Gamma, kg.K + p.Bvec])


def measure_density(p: ChaplyginParams, Gamma) -> float:
    return _checked_denominator(p, Gamma) ** -0.5


def conformal_factor(p: ChaplyginParams, Gamma) -> float:
    return _checked_denominator(p, Gamma) ** 0.5


DEFAULT_K = (1.0, 0.5, -0.8)
DEFAULT_ANGLES = (1.1, 0.7)  # (theta, psi) of the initial Poisson vector


def default_initial_state(p: ChaplyginParams = ChaplyginParams()) -> PhasePoint:
    """A reference initial state whose trajectory stays well inside the chart for t in [0, 10]."""
    th, ps = DEFAULT_ANGLES
    return chart_from_kgamma(p, KGammaPoint(np.array(DEFAULT_K), euler.poisson_vector(th, ps)))
