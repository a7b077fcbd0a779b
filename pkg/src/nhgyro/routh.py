"""Routh reduction of abelian cyclic variables at a fixed momentum level.

An extended mechanical system on ``(q, theta)`` whose metric and potential do
not depend on ``theta`` reduces, on the level set ``p_theta = mu``, to a system
on ``q`` alone whose Lagrangian has a velocity-linear (gyroscopic) term.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .chart import ChartedSystem
from .errors import InvalidParams, LinearSolveFailure

Array = np.ndarray


@dataclass(frozen=True)
class ExtendedBlocks:
    """Blocks of the extended metric ``[[Gqq, Gqth], [Gqth^T, Gthth]]`` and the potential.

    The optional ``*_jac`` callbacks return derivatives with the ``q`` index
    last; they are only used to give the generated charted systems analytic
    derivative data.
    """

    Gqq: Callable[[Array], Array]
    Gqth: Callable[[Array], Array]
    Gthth: Callable[[Array], Array]
    Vtilde: Callable[[Array], float]
    l: int
    mu: Array
    n: int
    Gqq_jac: Optional[Callable[[Array], Array]] = None
    Gqth_jac: Optional[Callable[[Array], Array]] = None
    Gthth_jac: Optional[Callable[[Array], Array]] = None
    Vtilde_grad: Optional[Callable[[Array], Array]] = None

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        object.__setattr__(self, "mu", mu)
        if mu.shape != (self.l,):
            raise InvalidParams(f"mu must have {self.l} components")
        if self.n < 1 or self.l < 1:
            raise InvalidParams("need at least one shape and one cyclic variable")

    def extended_metric(self, q) -> Array:
        B = np.asarray(self.Gqth(q), dtype=float).reshape(self.n, self.l)
        return np.block([[np.asarray(self.Gqq(q), dtype=float), B], [B.T, self._gthth(q)]])

    def _gthth(self, q) -> Array:
        return np.asarray(self.Gthth(q), dtype=float).reshape(self.l, self.l)

    def _gqth(self, q) -> Array:
        return np.asarray(self.Gqth(q), dtype=float).reshape(self.n, self.l)


class RouthTerms(NamedTuple):
    metric: Callable[[Array], Array]
    eta: Callable[[Array], Array]
    potential: Callable[[Array], float]


def _solve(G: Array, rhs: Array) -> Array:
    try:
        return np.linalg.solve(G, rhs)
    except np.linalg.LinAlgError as exc:
        raise LinearSolveFailure(f"cyclic block singular: {exc}") from exc


def check_blocks(b: ExtendedBlocks, points: Sequence) -> None:
    """Raise ``InvalidParams`` unless both ``Gthth`` and the extended metric are positive definite."""
    for q in points:
        q = np.asarray(q, dtype=float)
        if np.linalg.eigvalsh(b._gthth(q)).min() <= 0:
            raise InvalidParams(f"Gthth not positive definite at q={q.tolist()}")
        if np.linalg.eigvalsh(b.extended_metric(q)).min() <= 0:
            raise InvalidParams(f"extended metric not positive definite at q={q.tolist()}")


def routh_reduce(b: ExtendedBlocks) -> RouthTerms:
    """Reduced metric, gyroscopic 1-form and amended potential as callbacks."""

    def metric(q):
        B = b._gqth(q)
        return np.asarray(b.Gqq(q), dtype=float) - B @ _solve(b._gthth(q), B.T)

    def eta(q):
        return b._gqth(q) @ _solve(b._gthth(q), b.mu)

    def potential(q):
        return float(b.Vtilde(q)) + 0.5 * float(b.mu @ _solve(b._gthth(q), b.mu))

    return RouthTerms(metric, eta, potential)


def theta_dot_recover(b: ExtendedBlocks, q, qdot) -> Array:
    """Cyclic velocities on the level set, ``Gthth^{-1} (mu - Gqth^T qdot)``."""
    q = np.asarray(q, dtype=float)
    return _solve(b._gthth(q), b.mu - b._gqth(q).T @ np.asarray(qdot, dtype=float))


def cyclic_momentum(b: ExtendedBlocks, q, qdot, thdot) -> Array:
    return b._gqth(q).T @ np.asarray(qdot, dtype=float) + b._gthth(q) @ np.asarray(thdot, dtype=float)


def _identity_frame(dim: int):
    eye = np.eye(dim)
    zero = np.zeros((dim, dim, dim))
    return (lambda q: eye), (lambda q: zero)


def _reduced_jacobians(b: ExtendedBlocks):
    """Analytic derivatives of the reduced metric and 1-form, when all block jacobians exist."""
    if b.Gqq_jac is None or b.Gqth_jac is None or b.Gthth_jac is None:
        return None, None

    def parts(q):
        B = b._gqth(q)
        G = b._gthth(q)
        dB = np.asarray(b.Gqth_jac(q), dtype=float).reshape(b.n, b.l, b.n)
        dC = np.asarray(b.Gthth_jac(q), dtype=float).reshape(b.l, b.l, b.n)
        return B, G, dB, dC

    def metric_jac(q):
        B, G, dB, dC = parts(q)
        X = _solve(G, B.T)  # Gthth^{-1} B^T
        t = np.einsum("iJk,Jj->ijk", dB, X)
        corr = np.einsum("Ji,JKk,Kj->ijk", X, dC, X)
        return np.asarray(b.Gqq_jac(q), dtype=float) - t - t.transpose(1, 0, 2) + corr

    def eta_jac(q):
        B, G, dB, dC = parts(q)
        y = _solve(G, b.mu)
        dy = -np.stack([_solve(G, dC[:, :, k] @ y) for k in range(b.n)], axis=-1)
        return np.einsum("iJk,J->ik", dB, y) + B @ dy

    return metric_jac, eta_jac


def reduced_system(b: ExtendedBlocks, name: str = "routh-reduced") -> ChartedSystem:
    """Reduced system on ``q`` with the coordinate frame (no constraints, ``r = n``)."""
    terms = routh_reduce(b)
    frame, frame_jac = _identity_frame(b.n)
    metric_jac, eta_jac = _reduced_jacobians(b)
    pot_grad = None
    if b.Vtilde_grad is not None and b.Gthth_jac is not None:

        def pot_grad(q):
            y = _solve(b._gthth(q), b.mu)
            dC = np.asarray(b.Gthth_jac(q), dtype=float).reshape(b.l, b.l, b.n)
            return np.asarray(b.Vtilde_grad(q), dtype=float) - 0.5 * np.einsum("J,JKk,K->k", y, dC, y)

    return ChartedSystem(
        n=b.n,
        r=b.n,
        frame=frame,
        frame_jacobian=frame_jac,
        metric_coords=terms.metric,
        metric_jacobian=metric_jac,
        eta_coords=terms.eta,
        eta_jacobian=eta_jac,
        potential=terms.potential,
        potential_grad=pot_grad,
        name=name,
    )


def extended_system(b: ExtendedBlocks, name: str = "routh-extended") -> ChartedSystem:
    """The unreduced system on ``(q, theta)`` with the coordinate frame."""
    n, l = b.n, b.l
    dim = n + l
    frame, frame_jac = _identity_frame(dim)

    def metric_jac(x):
        q = x[:n]
        out = np.zeros((dim, dim, dim))
        if b.Gqq_jac is None or b.Gqth_jac is None or b.Gthth_jac is None:
            raise NotImplementedError
        dB = np.asarray(b.Gqth_jac(q), dtype=float).reshape(n, l, n)
        out[:n, :n, :n] = b.Gqq_jac(q)
        out[:n, n:, :n] = dB
        out[n:, :n, :n] = dB.transpose(1, 0, 2)
        out[n:, n:, :n] = np.asarray(b.Gthth_jac(q), dtype=float).reshape(l, l, n)
        return out

    has_jac = not (b.Gqq_jac is None or b.Gqth_jac is None or b.Gthth_jac is None)
    pot_grad = None
    if b.Vtilde_grad is not None:

        def pot_grad(x):
            return np.concatenate([np.asarray(b.Vtilde_grad(x[:n]), dtype=float), np.zeros(l)])

    return ChartedSystem(
        n=dim,
        r=dim,
        frame=frame,
        frame_jacobian=frame_jac,
        metric_coords=lambda x: b.extended_metric(x[:n]),
        metric_jacobian=metric_jac if has_jac else None,
        potential=lambda x: float(b.Vtilde(x[:n])),
        potential_grad=pot_grad,
        name=name,
    )


def coordinate_field(n: int, metric, metric_jac, eta, eta_jac, potential_grad):
    """Hamilton's equations in a coordinate frame with a gyroscopic term.

    Equivalent to the momentum-side field of the corresponding unconstrained
    charted system, without the frame machinery; used for long fixed-step runs.
    """

    def field_fn(x):
        q, p = x[:n], x[n:]
        v = np.linalg.solve(metric(q), p - eta(q))
        pdot = 0.5 * np.einsum("ijk,i,j->k", metric_jac(q), v, v) + eta_jac(q).T @ v - potential_grad(q)
        return np.concatenate([v, pdot])

    return field_fn


def _require_jacobians(b: ExtendedBlocks):
    if None in (b.Gqq_jac, b.Gqth_jac, b.Gthth_jac, b.Vtilde_grad):
        raise InvalidParams("fast fields need all block jacobians and the potential gradient")


def reduced_field(b: ExtendedBlocks):
    """Flat field on ``(q, p)`` for the reduced system."""
    _require_jacobians(b)
    sys = reduced_system(b)
    return coordinate_field(b.n, sys.metric_coords, sys.metric_jacobian, sys.eta_coords, sys.eta_jacobian, sys.potential_grad)


def extended_field(b: ExtendedBlocks):
    """Flat field on ``(q, theta, p_q, p_theta)`` for the unreduced system."""
    _require_jacobians(b)
    sys = extended_system(b)
    dim = b.n + b.l
    zero_eta = np.zeros(dim)
    zero_deta = np.zeros((dim, dim))
    return coordinate_field(
        dim, sys.metric_coords, sys.metric_jacobian, lambda x: zero_eta, lambda x: zero_deta, sys.potential_grad
    )


def level_set_states(b: ExtendedBlocks, q0, qdot0, theta0: float = 0.0):
    """Matching initial states ``(x_full, x_reduced)`` for a shape velocity ``qdot0``."""
    q0 = np.asarray(q0, dtype=float)
    qdot0 = np.asarray(qdot0, dtype=float)
    thdot = theta_dot_recover(b, q0, qdot0)
    p_full = b.extended_metric(q0) @ np.concatenate([qdot0, thdot])
    terms = routh_reduce(b)
    p_red = terms.metric(q0) @ qdot0 + terms.eta(q0)
    x_full = np.concatenate([q0, np.full(b.l, theta0), p_full])
    return x_full, np.concatenate([q0, p_red])


def toy_blocks(mu: float = 1.0, k: float = 1.0) -> ExtendedBlocks:
    """Two shape variables and one rotor angle.

    ``Gqq = Id``, ``Gqth = (sin q1, 0)``, ``Gthth = 2`` and
    ``Vtilde = k/2 |q|^2``; the extended metric is positive definite everywhere.
    """

    def gqth_jac(q):
        d = np.zeros((2, 1, 2))
        d[0, 0, 0] = np.cos(q[0])
        return d

    return ExtendedBlocks(
        Gqq=lambda q: np.eye(2),
        Gqth=lambda q: np.array([[np.sin(q[0])], [0.0]]),
        Gthth=lambda q: np.array([[2.0]]),
        Vtilde=lambda q: 0.5 * k * float(q @ q),
        l=1,
        mu=np.array([mu]),
        n=2,
        Gqq_jac=lambda q: np.zeros((2, 2, 2)),
        Gqth_jac=gqth_jac,
        Gthth_jac=lambda q: np.zeros((1, 1, 2)),
        Vtilde_grad=lambda q: k * np.asarray(q, dtype=float),
    )
