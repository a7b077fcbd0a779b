"""Constrained Legendre transform, constrained Lagrangian, energy and Hamiltonian.

On the constraint space the Legendre map is affine,
``p_a = g_ab v^b + eta_a``, so the gyroscopic term only shifts momenta.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .chart import (
    ChartedSystem,
    admit,
    central_jacobian,
    eta_derivative,
    eta_frame,
    fd_steps,
    frame_metric,
    metric_derivative,
    potential_at,
    potential_gradient,
)
from .errors import LinearSolveFailure


@dataclass(frozen=True)
class VelocityPoint:
    """Configuration ``q`` and constrained quasi-velocities ``v^a``."""

    q: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.v))):
            raise ValueError("VelocityPoint entries must be finite")


@dataclass(frozen=True)
class PhasePoint:
    """Configuration ``q`` and quasi-momenta ``p_a``."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.p))):
            raise ValueError("PhasePoint entries must be finite")

    def flat(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_flat(cls, x, n: int) -> "PhasePoint":
        x = np.asarray(x, dtype=float)
        return cls(x[:n], x[n:])


def constrained_block(sys: ChartedSystem, q):
    """The ``r x r`` metric block ``g_ab`` and the parallel components ``eta_a``."""
    g = frame_metric(sys, q)
    eta = eta_frame(sys, q)
    return g[: sys.r, : sys.r], eta[: sys.r]


def _cholesky(gab):
    try:
        return cho_factor(gab, lower=True)
    except np.linalg.LinAlgError as exc:
        raise LinearSolveFailure(f"constrained metric block not positive definite: {exc}") from exc


def inverse_metric_block(sys: ChartedSystem, q) -> np.ndarray:
    """``g^{ab}``, the inverse of the constrained metric block."""
    gab, _ = constrained_block(sys, q)
    return cho_solve(_cholesky(gab), np.eye(sys.r))


def legendre_fwd(sys: ChartedSystem, vp: VelocityPoint) -> PhasePoint:
    gab, eta = constrained_block(sys, vp.q)
    return PhasePoint(vp.q, gab @ vp.v + eta)


def legendre_inv(sys: ChartedSystem, pp: PhasePoint) -> VelocityPoint:
    gab, eta = constrained_block(sys, pp.q)
    return VelocityPoint(pp.q, cho_solve(_cholesky(gab), pp.p - eta))


def constrained_lagrangian(sys: ChartedSystem, vp: VelocityPoint) -> float:
    gab, eta = constrained_block(sys, vp.q)
    v = vp.v
    return float(0.5 * v @ gab @ v + eta @ v - potential_at(sys, vp.q))


def constrained_energy(sys: ChartedSystem, vp: VelocityPoint) -> float:
    gab, _ = constrained_block(sys, vp.q)
    return float(0.5 * vp.v @ gab @ vp.v + potential_at(sys, vp.q))


def constrained_hamiltonian(sys: ChartedSystem, pp: PhasePoint) -> float:
    gab, eta = constrained_block(sys, pp.q)
    w = pp.p - eta
    return float(0.5 * w @ cho_solve(_cholesky(gab), w) + potential_at(sys, pp.q))


def hamiltonian_grad_p(sys: ChartedSystem, pp: PhasePoint) -> np.ndarray:
    """``dH_c/dp_a``, which is the quasi-velocity ``v^a``."""
    return legendre_inv(sys, pp).v


def hamiltonian_grad_q_chain(sys: ChartedSystem, pp: PhasePoint) -> np.ndarray:
    """``dH_c/dq^k = -1/2 v.(d_k g) v - (d_k eta).v + d_k V`` at fixed ``p``."""
    q = admit(sys, pp.q)
    r = sys.r
    v = legendre_inv(sys, pp).v
    dg = metric_derivative(sys, q)[:r, :r, :]
    deta = eta_derivative(sys, q)[:r, :]
    return -0.5 * np.einsum("abk,a,b->k", dg, v, v) - deta.T @ v + potential_gradient(sys, q)


def hamiltonian_grad_q(sys: ChartedSystem, pp: PhasePoint, analytic: bool = True) -> np.ndarray:
    """``dH_c/dq^i``.

    With ``analytic=True`` a closed form shipped by the system wins, then the
    chain rule when the metric jacobian is analytic.  Otherwise central
    differences of ``H_c`` are used.
    """
    q = admit(sys, pp.q)
    if analytic and sys.hamiltonian_grad_q is not None:
        return np.asarray(sys.hamiltonian_grad_q(q, pp.p), dtype=float)
    if analytic and sys.metric_jacobian is not None:
        return hamiltonian_grad_q_chain(sys, pp)
    return central_jacobian(lambda x: np.array(constrained_hamiltonian(sys, PhasePoint(x, pp.p))), q)


def lagrangian_grad_q(sys: ChartedSystem, vp: VelocityPoint) -> np.ndarray:
    """``dL_c/dq^i`` by central differences at fixed quasi-velocities."""
    q = admit(sys, vp.q)
    return central_jacobian(lambda x: np.array(constrained_lagrangian(sys, VelocityPoint(x, vp.v))), q)


def hamiltonian_grad_p_fd(sys: ChartedSystem, pp: PhasePoint) -> np.ndarray:
    """``dH_c/dp_a`` by central differences, used to cross-check ``legendre_inv``."""
    h = fd_steps(pp.p)
    out = np.empty(sys.r)
    for a in range(sys.r):
        e = np.zeros(sys.r)
        e[a] = h[a]
        hp = constrained_hamiltonian(sys, PhasePoint(pp.q, pp.p + e))
        hm = constrained_hamiltonian(sys, PhasePoint(pp.q, pp.p - e))
        out[a] = (hp - hm) / (2 * h[a])
    return out
