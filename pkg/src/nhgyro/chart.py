"""Nonholonomic systems in a single coordinate chart.

A system is described by coordinate-basis data (kinetic-energy metric, the
gyroscopic 1-form and the potential) together with a frame ``rho(q)`` whose
first ``r`` columns span the constraint distribution and whose remaining
columns span its metric orthogonal complement.  Everything expressed in the
frame (metric blocks, quasi-components of the 1-form, structure functions) is
derived here from those callbacks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import InvalidParams, LinearSolveFailure, SingularChart

FD_REL_STEP = np.finfo(float).eps ** (1.0 / 3.0)
FRAME_COND_MAX = 1e12
ADAPTED_TOL = 1e-10

Array = np.ndarray


def fd_steps(x: Array) -> Array:
    """Central-difference steps ``cbrt(eps) * max(1, |x_k|)``."""
    return FD_REL_STEP * np.maximum(1.0, np.abs(x))


def central_jacobian(fun: Callable[[Array], Array], x: Array) -> Array:
    """Derivative of an array-valued ``fun`` by central differences.

    The derivative index is appended last: ``out[..., k] = d fun / d x_k``.
    """
    x = np.asarray(x, dtype=float)
    h = fd_steps(x)
    cols = []
    for k in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[k] += h[k]
        xm[k] -= h[k]
        cols.append((np.asarray(fun(xp), dtype=float) - np.asarray(fun(xm), dtype=float)) / (xp[k] - xm[k]))
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class ChartedSystem:
    """A nonholonomic system with gyroscopic term in one chart.

    ``frame(q)`` returns the ``n x n`` matrix ``rho`` with ``rho[j, i]`` the
    ``q^j`` component of the frame field ``e_i``.  ``frame_jacobian(q)``, when
    given, returns ``D[j, i, k] = d rho[j, i] / d q^k``.  ``domain_guard(q)``
    returns ``None`` for admitted points and a human-readable reason otherwise.
    """

    n: int
    r: int
    frame: Callable[[Array], Array]
    metric_coords: Callable[[Array], Array]
    eta_coords: Optional[Callable[[Array], Array]] = None
    potential: Optional[Callable[[Array], float]] = None
    potential_grad: Optional[Callable[[Array], Array]] = None
    frame_jacobian: Optional[Callable[[Array], Array]] = None
    metric_jacobian: Optional[Callable[[Array], Array]] = None
    eta_jacobian: Optional[Callable[[Array], Array]] = None
    domain_guard: Optional[Callable[[Array], Optional[str]]] = None
    hamiltonian_grad_q: Optional[Callable[[Array, Array], Array]] = None
    integrals: Mapping[str, Callable[[Array, Array], float]] = field(default_factory=dict)
    diagnostics: Mapping[str, Callable[[Array, Array], float]] = field(default_factory=dict)
    name: str = "custom"

    def __post_init__(self):
        if self.n < 1 or not (1 <= self.r <= self.n):
            raise InvalidParams(f"need 1 <= r <= n, got n={self.n}, r={self.r}")

    def with_eta(self, eta_coords) -> "ChartedSystem":
        """Copy of the system with a different gyroscopic 1-form (``None`` for zero)."""
        from dataclasses import replace

        return replace(self, eta_coords=eta_coords, eta_jacobian=None, hamiltonian_grad_q=None)


@dataclass(frozen=True)
class StructureData:
    """Structure functions ``C[k, i, j] = C^k_{ij}`` of the frame at one point."""

    C: Array
    r: int

    @property
    def parallel(self) -> Array:
        """``C^c_{ab}`` indexed ``[c, a, b]`` with all indices <= r."""
        return self.C[: self.r, : self.r, : self.r]

    @property
    def transverse(self) -> Array:
        """``C^gamma_{ab}`` indexed ``[gamma - r, a, b]``."""
        return self.C[self.r :, : self.r, : self.r]


def admit(sys: ChartedSystem, q) -> Array:
    q = np.asarray(q, dtype=float)
    if q.shape != (sys.n,):
        raise ValueError(f"expected q of shape ({sys.n},), got {q.shape}")
    if not np.all(np.isfinite(q)):
        raise SingularChart("non-finite coordinates")
    if sys.domain_guard is not None:
        reason = sys.domain_guard(q)
        if reason:
            raise SingularChart(reason)
    return q


def frame_at(sys: ChartedSystem, q) -> Array:
    q = admit(sys, q)
    return np.asarray(sys.frame(q), dtype=float)


def frame_derivative(sys: ChartedSystem, q) -> Array:
    """``D[j, i, k] = d rho^j_i / d q^k``, analytic if available."""
    q = admit(sys, q)
    if sys.frame_jacobian is not None:
        return np.asarray(sys.frame_jacobian(q), dtype=float)
    return central_jacobian(sys.frame, q)


def frame_metric(sys: ChartedSystem, q) -> Array:
    """Metric in the frame, ``g_ij = rho^k_i rho^l_j gtilde_kl``."""
    rho = frame_at(sys, q)
    g = rho.T @ np.asarray(sys.metric_coords(q), dtype=float) @ rho
    return 0.5 * (g + g.T)


def eta_coords_at(sys: ChartedSystem, q) -> Array:
    if sys.eta_coords is None:
        return np.zeros(sys.n)
    return np.asarray(sys.eta_coords(q), dtype=float)


def eta_frame(sys: ChartedSystem, q) -> Array:
    """Frame components ``eta_i = rho^k_i etatilde_k`` of the gyroscopic 1-form."""
    rho = frame_at(sys, q)
    return rho.T @ eta_coords_at(sys, q)


def potential_at(sys: ChartedSystem, q) -> float:
    if sys.potential is None:
        return 0.0
    return float(sys.potential(q))


def potential_gradient(sys: ChartedSystem, q) -> Array:
    q = admit(sys, q)
    if sys.potential is None:
        return np.zeros(sys.n)
    if sys.potential_grad is not None:
        return np.asarray(sys.potential_grad(q), dtype=float)
    return central_jacobian(lambda x: np.array(sys.potential(x)), q)


def _checked_solve(rho: Array, rhs: Array) -> Array:
    cond = np.linalg.cond(rho)
    if not np.isfinite(cond) or cond > FRAME_COND_MAX:
        raise LinearSolveFailure(f"frame condition number {cond:.3e} exceeds {FRAME_COND_MAX:.0e}")
    return np.linalg.solve(rho, rhs)


def structure_functions(sys: ChartedSystem, q) -> StructureData:
    """Expand the Lie brackets ``[e_i, e_j]`` back in the frame."""
    rho = frame_at(sys, q)
    D = frame_derivative(sys, q)
    n = sys.n
    # A[m, j, i] = (e_i applied to the components of e_j)^m
    A = np.einsum("mjl,li->mji", D, rho)
    C = np.zeros((n, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            lie = A[:, j, i] - A[:, i, j]
            C[:, i, j] = lie
            C[:, j, i] = -lie
    flat = _checked_solve(rho, C.reshape(n, n * n)).reshape(n, n, n)
    # mirror so that antisymmetry holds bitwise after the solve
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    out = np.zeros_like(flat)
    for k in range(n):
        out[k][upper] = flat[k][upper]
        out[k] = out[k] - out[k].T
    return StructureData(C=out, r=sys.r)


def metric_derivative(sys: ChartedSystem, q) -> Array:
    """``dg[i, j, k] = d g_ij / d q^k`` for the frame metric."""
    q = admit(sys, q)
    rho = np.asarray(sys.frame(q), dtype=float)
    D = frame_derivative(sys, q)
    gt = np.asarray(sys.metric_coords(q), dtype=float)
    if sys.metric_jacobian is not None:
        dgt = np.asarray(sys.metric_jacobian(q), dtype=float)
    else:
        dgt = central_jacobian(sys.metric_coords, q)
    term = np.einsum("lik,lm,mj->ijk", D, gt, rho)
    out = term + term.transpose(1, 0, 2) + np.einsum("li,lmk,mj->ijk", rho, dgt, rho)
    return 0.5 * (out + out.transpose(1, 0, 2))


def eta_derivative(sys: ChartedSystem, q) -> Array:
    """``deta[i, k] = d eta_i / d q^k`` for the frame components of eta."""
    q = admit(sys, q)
    if sys.eta_coords is None:
        return np.zeros((sys.n, sys.n))
    rho = np.asarray(sys.frame(q), dtype=float)
    D = frame_derivative(sys, q)
    et = np.asarray(sys.eta_coords(q), dtype=float)
    if sys.eta_jacobian is not None:
        det = np.asarray(sys.eta_jacobian(q), dtype=float)
    else:
        det = central_jacobian(sys.eta_coords, q)
    return np.einsum("lik,l->ik", D, et) + rho.T @ det


def frame_directional_derivative(sys: ChartedSystem, q, grad_f) -> Array:
    """``e_i(f) = rho^j_i df/dq^j`` for all frame fields at once."""
    return frame_at(sys, q).T @ np.asarray(grad_f, dtype=float)


@dataclass
class PointCheck:
    max_offdiag: float
    worst_entry: tuple
    min_metric_eig: float
    frame_cond: float
    ok: bool


@dataclass
class ValidationReport:
    checks: list
    failures: list
    passed: bool

    @property
    def max_offdiag(self) -> float:
        return max(c.max_offdiag for c in self.checks)


def validate_adapted(
    sys: ChartedSystem,
    sample_points: Sequence,
    tol: float = ADAPTED_TOL,
    cond_max: float = FRAME_COND_MAX,
) -> ValidationReport:
    """Check adaptedness, metric positivity and frame conditioning at sample points."""
    if len(sample_points) == 0:
        raise ValueError("need at least one sample point")
    r = sys.r
    checks, failures = [], []
    for idx, q in enumerate(sample_points):
        try:
            q = admit(sys, q)
        except SingularChart as exc:
            failures.append(f"point {idx}: singular chart ({exc})")
            checks.append(PointCheck(np.inf, (), -np.inf, np.inf, False))
            continue
        rho = np.asarray(sys.frame(q), dtype=float)
        gt = np.asarray(sys.metric_coords(q), dtype=float)
        g = rho.T @ gt @ rho
        block = np.abs(g[:r, r:])
        if block.size:
            a, al = np.unravel_index(np.argmax(block), block.shape)
            worst, entry = float(block[a, al]), (int(a) + 1, int(al) + r + 1)
        else:
            worst, entry = 0.0, ()
        min_eig = float(np.linalg.eigvalsh(0.5 * (gt + gt.T)).min())
        cond = float(np.linalg.cond(rho))
        ok = True
        if worst > tol:
            ok = False
            failures.append(
                f"point {idx}: off-diagonal block g[a, alpha] (a <= {r} < alpha) not zero, "
                f"|g{entry}| = {worst:.3e}"
            )
        if min_eig <= 0:
            ok = False
            failures.append(f"point {idx}: coordinate metric not positive definite (min eig {min_eig:.3e})")
        if not np.isfinite(cond) or cond > cond_max:
            ok = False
            failures.append(f"point {idx}: frame condition number {cond:.3e}")
        checks.append(PointCheck(worst, entry, min_eig, cond, ok))
    return ValidationReport(checks=checks, failures=failures, passed=not failures)
