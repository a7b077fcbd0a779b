"""Suslov problem with gyrostat on the Euler-angle chart of SO(3).

The body axis ``E_3`` is the axis of forbidden rotation, so the constraint is
``Omega_3 = 0``.  The frame is left invariant, which makes the momentum
bracket independent of the angles and lets ``(p_1, p_2)`` (or
``(Omega_1, Omega_2)``) serve as coordinates on the reduced space.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..chart import ChartedSystem
from ..errors import InvalidParams
from ..legendre import PhasePoint
from . import euler


@dataclass(frozen=True)
class SuslovParams:
    I11: float = 2.0
    I22: float = 3.0
    I33: float = 4.0
    I13: float = 0.3
    I23: float = 0.2
    B: tuple = (0.1, 0.2, 0.3)

    def __post_init__(self):
        object.__setattr__(self, "B", tuple(float(b) for b in self.B))
        if len(self.B) != 3:
            raise InvalidParams("B must have three components")
        if not np.all(np.isfinite(self.inertia)) or np.linalg.eigvalsh(self.inertia).min() <= 0:
            raise InvalidParams(f"inertia matrix not positive definite: {self.inertia.tolist()}")

    @property
    def inertia(self) -> np.ndarray:
        return np.array(
            [
                [self.I11, 0.0, self.I13],
                [0.0, self.I22, self.I23],
                [self.I13, self.I23, self.I33],
            ]
        )

    @property
    def Bvec(self) -> np.ndarray:
        return np.array(self.B)


def _frame(p: SuslovParams, q) -> np.ndarray:
    _, th, ps = q
    st, ct = np.sin(th), np.cos(th)
    sp, cp = np.sin(ps), np.cos(ps)
    f = p.I13 * p.I22 * sp + p.I11 * p.I23 * cp
    e1 = [sp / st, cp, -ct * sp / st]
    e2 = [cp / st, -sp, -ct * cp / st]
    e3 = [-f, (p.I11 * p.I23 * sp - p.I13 * p.I22 * cp) * st, f * ct + p.I11 * p.I22 * st]
    return np.column_stack([e1, e2, e3])


def _frame_jacobian(p: SuslovParams, q) -> np.ndarray:
    _, th, ps = q
    st, ct = np.sin(th), np.cos(th)
    sp, cp = np.sin(ps), np.cos(ps)
    f = p.I13 * p.I22 * sp + p.I11 * p.I23 * cp
    df = p.I13 * p.I22 * cp - p.I11 * p.I23 * sp
    h = p.I11 * p.I23 * sp - p.I13 * p.I22 * cp
    D = np.zeros((3, 3, 3))
    D[:, 0, 1] = [-sp * ct / st**2, 0.0, sp / st**2]
    D[:, 0, 2] = [cp / st, -sp, -ct * cp / st]
    D[:, 1, 1] = [-cp * ct / st**2, 0.0, cp / st**2]
    D[:, 1, 2] = [-sp / st, -cp, ct * sp / st]
    D[:, 2, 1] = [0.0, h * ct, -f * st + p.I11 * p.I22 * ct]
    D[:, 2, 2] = [-df, f * st, df * ct]
    return D


def _metric(p: SuslovParams, q) -> np.ndarray:
    J = euler.body_rate_matrix(q[1], q[2])
    return J.T @ p.inertia @ J


def _metric_jacobian(p: SuslovParams, q) -> np.ndarray:
    J = euler.body_rate_matrix(q[1], q[2])
    dJ = euler.body_rate_matrix_jacobian(q[1], q[2])
    t = np.einsum("lik,lm,mj->ijk", dJ, p.inertia, J)
    return t + t.transpose(1, 0, 2)


def _eta(p: SuslovParams, q) -> np.ndarray:
    return euler.body_rate_matrix(q[1], q[2]).T @ p.Bvec


def _eta_jacobian(p: SuslovParams, q) -> np.ndarray:
    return np.einsum("lik,l->ik", euler.body_rate_matrix_jacobian(q[1], q[2]), p.Bvec)


def suslov_system(p: SuslovParams = SuslovParams()) -> ChartedSystem:
    """``n = 3``, ``r = 2`` system on ``(phi, theta, psi)``."""
    if not isinstance(p, SuslovParams):
        raise InvalidParams("expected SuslovParams")
    return ChartedSystem(
        n=3,
        r=2,
        frame=lambda q: _frame(p, q),
        frame_jacobian=lambda q: _frame_jacobian(p, q),
        metric_coords=lambda q: _metric(p, q),
        metric_jacobian=lambda q: _metric_jacobian(p, q),
        eta_coords=lambda q: _eta(p, q),
        eta_jacobian=lambda q: _eta_jacobian(p, q),
        domain_guard=lambda q: euler.theta_guard(q[1]),
        # H_c = (p1-B1)^2/(2 I11) + (p2-B2)^2/(2 I22) does not depend on the angles
        hamiltonian_grad_q=lambda q, mom: np.zeros(3),
        name="suslov",
    )


# closed forms in the adapted frame, used as oracles


def frame_metric_block(p: SuslovParams) -> np.ndarray:
    return np.diag([p.I11, p.I22])


def eta_perp_coefficient(p: SuslovParams, theta: float) -> float:
    return (p.I11 * p.I22 * p.B[2] - p.I13 * p.I22 * p.B[0] - p.I11 * p.I23 * p.B[1]) * np.sin(theta)


def structure_constants(p: SuslovParams, theta: float) -> np.ndarray:
    """``(C^1_12, C^2_12, C^3_12)``."""
    return np.array([p.I13 / p.I11, p.I23 / p.I22, 1.0 / (p.I11 * p.I22 * np.sin(theta))])


def dual_basis(p: SuslovParams, q) -> np.ndarray:
    """Rows are the co-frame 1-forms ``e^1, e^2, e^3`` in ``(dphi, dtheta, dpsi)``."""
    _, th, ps = q
    st, ct = np.sin(th), np.cos(th)
    sp, cp = np.sin(ps), np.cos(ps)
    a, b = p.I13 / p.I11, p.I23 / p.I22
    return np.array(
        [
            [a * ct + st * sp, cp, a],
            [b * ct + st * cp, -sp, b],
            [ct / (p.I11 * p.I22 * st), 0.0, 1.0 / (p.I11 * p.I22 * st)],
        ]
    )


def momentum_bracket(p: SuslovParams, mom) -> float:
    """``{p_1, p_2}`` in closed form."""
    p1, p2 = mom
    B1, B2, B3 = p.B
    return (
        -p.I13 / p.I11 * p1
        - p.I23 / p.I22 * p2
        - (p.I11 * p.I22 * B3 - p.I13 * p.I22 * B1 - p.I11 * p.I23 * B2) / (p.I11 * p.I22)
    )


def quasi_velocities_from_omega(p: SuslovParams, Omega, theta: float) -> np.ndarray:
    O1, O2, O3 = Omega
    return np.array(
        [
            O1 + p.I13 / p.I11 * O3,
            O2 + p.I23 / p.I22 * O3,
            O3 / (p.I11 * p.I22 * np.sin(theta)),
        ]
    )


def suslov_reference_rhs(p: SuslovParams, Omega) -> np.ndarray:
    O1, O2 = Omega
    s = p.I13 * O1 + p.I23 * O2 + p.B[2]
    return np.array([-s * O2 / p.I11, s * O1 / p.I22])


def suslov_reference_bracket(p: SuslovParams, Omega) -> float:
    O1, O2 = Omega
    return -(p.I13 * O1 + p.I23 * O2 + p.B[2]) / (p.I11 * p.I22)


def suslov_energy(p: SuslovParams, Omega) -> float:
    O1, O2 = Omega
    return 0.5 * (p.I11 * O1**2 + p.I22 * O2**2)


def suslov_omega_map(p: SuslovParams, pp: PhasePoint) -> np.ndarray:
    return np.array([(pp.p[0] - p.B[0]) / p.I11, (pp.p[1] - p.B[1]) / p.I22])


def suslov_omega_jacobian(p: SuslovParams) -> np.ndarray:
    """``d(Omega_1, Omega_2) / d(q, p)`` for the 5-dimensional phase space."""
    jac = np.zeros((2, 5))
    jac[0, 3] = 1.0 / p.I11
    jac[1, 4] = 1.0 / p.I22
    return jac


def suslov_momenta_from_omega(p: SuslovParams, Omega) -> np.ndarray:
    O1, O2 = Omega
    return np.array([p.I11 * O1 + p.B[0], p.I22 * O2 + p.B[1]])
