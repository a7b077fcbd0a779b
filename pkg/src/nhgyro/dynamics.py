"""Nonholonomic vector fields on the momentum and velocity sides, integration, monitors."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np
from scipy.integrate import RK45

from .bracket import GaugeForm, assemble_pi_gauge
from .chart import (
    ChartedSystem,
    admit,
    eta_derivative,
    eta_frame,
    frame_at,
    metric_derivative,
    potential_gradient,
    structure_functions,
)
from .errors import ChartExit, LinearSolveFailure, SingularChart, StepRejectionLimit
from .legendre import (
    PhasePoint,
    VelocityPoint,
    constrained_block,
    constrained_energy,
    constrained_hamiltonian,
    hamiltonian_grad_p,
    hamiltonian_grad_q,
    legendre_fwd,
)

DEFAULT_DT = 1e-3
DEFAULT_TOL = 1e-9


def xnh_momentum(
    sys: ChartedSystem,
    pp: PhasePoint,
    gauge: Optional[GaugeForm] = None,
    analytic: bool = True,
):
    """``(qdot, pdot)`` of the nonholonomic field on the momentum side.

    Without a gauge form the components are assembled term by term; with one
    the field is ``Pi^Lambda . dH_c``.
    """
    q = admit(sys, pp.q)
    n, r = sys.n, sys.r
    dHp = hamiltonian_grad_p(sys, pp)
    dHq = hamiltonian_grad_q(sys, pp, analytic=analytic)
    if gauge is not None:
        xdot = assemble_pi_gauge(sys, gauge, pp).pi @ np.concatenate([dHq, dHp])
        return xdot[:n], xdot[n:]
    rho = frame_at(sys, q)[:, :r]
    sd = structure_functions(sys, q)
    eta = eta_frame(sys, q)
    coeff = np.einsum("dab,d->ab", sd.parallel, pp.p)
    if r < n:
        coeff = coeff + np.einsum("gab,g->ab", sd.transverse, eta[r:])
    qdot = rho @ dHp
    pdot = -rho.T @ dHq - coeff @ dHp
    return qdot, pdot


def xnh_velocity(sys: ChartedSystem, vp: VelocityPoint):
    """``(qdot, vdot)`` from the Lagrangian form of the equations.

    ``d/dt (g_ab v^b + eta_a)`` is expanded by the chain rule and the
    resulting linear system ``g_ab vdot^b = rhs_a`` is solved.
    """
    q = admit(sys, vp.q)
    n, r = sys.n, sys.r
    v = vp.v
    rho = frame_at(sys, q)[:, :r]
    gab, eta_par = constrained_block(sys, q)
    eta = eta_frame(sys, q)
    dg = metric_derivative(sys, q)[:r, :r, :]
    deta = eta_derivative(sys, q)[:r, :]
    dV = potential_gradient(sys, q)
    sd = structure_functions(sys, q)

    qdot = rho @ v
    dLdq = 0.5 * np.einsum("bck,b,c->k", dg, v, v) + deta.T @ v - dV
    dLdv = gab @ v + eta_par
    rhs = rho.T @ dLdq - np.einsum("cab,b,c->a", sd.parallel, v, dLdv)
    if r < n:
        rhs -= np.einsum("gab,b,g->a", sd.transverse, v, eta[r:])
    rhs -= np.einsum("abk,k,b->a", dg, qdot, v) + deta @ qdot
    try:
        vdot = np.linalg.solve(gab, rhs)
    except np.linalg.LinAlgError as exc:
        raise LinearSolveFailure(str(exc)) from exc
    return qdot, vdot


def momentum_field(sys: ChartedSystem, gauge: Optional[GaugeForm] = None, analytic: bool = True):
    n = sys.n

    def field_fn(x):
        qdot, pdot = xnh_momentum(sys, PhasePoint(x[:n], x[n:]), gauge=gauge, analytic=analytic)
        return np.concatenate([qdot, pdot])

    return field_fn


def velocity_field(sys: ChartedSystem):
    n = sys.n

    def field_fn(x):
        qdot, vdot = xnh_velocity(sys, VelocityPoint(x[:n], x[n:]))
        return np.concatenate([qdot, vdot])

    return field_fn


def chart_guard(sys: ChartedSystem):
    """Guard on flat states built from the system's domain guard."""

    def guard(x):
        if not np.all(np.isfinite(x)):
            return "non-finite state"
        if sys.domain_guard is None:
            return None
        return sys.domain_guard(np.asarray(x[: sys.n]))

    return guard


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    monitors: dict = field(default_factory=dict)
    terminated: Optional[str] = None
    side: str = "momentum"

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if len(self.times) != len(self.states):
            raise ValueError("times and states differ in length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _rk4_step(f, x, h):
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    field_fn: Callable[[np.ndarray], np.ndarray],
    x0,
    t0: float,
    t1: float,
    dt: float = DEFAULT_DT,
    method: str = "rk4",
    guard: Optional[Callable] = None,
    monitors: Optional[Mapping[str, Callable]] = None,
    atol: float = DEFAULT_TOL,
    rtol: float = DEFAULT_TOL,
    strict: bool = False,
) -> Trajectory:
    """Integrate an autonomous field from ``t0`` to ``t1``.

    ``method`` is ``"rk4"`` (fixed step ``dt``) or ``"rk45"`` (embedded
    Dormand-Prince with ``atol``/``rtol``, ``dt`` used as the maximum step).
    When ``guard`` reports a reason the run stops and the partial trajectory is
    returned with ``terminated`` set; ``strict=True`` raises ``ChartExit``
    instead.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t1 > t0:
        raise ValueError("need t1 > t0")
    if method not in ("rk4", "rk45"):
        raise ValueError(f"unknown method {method!r}")
    x = np.asarray(x0, dtype=float).copy()
    if guard is not None:
        reason = guard(x)
        if reason:
            raise SingularChart(f"initial state not admitted: {reason}")

    times, states = [t0], [x.copy()]
    terminated = None

    def accept(t, xn):
        nonlocal terminated
        reason = guard(xn) if guard is not None else None
        if reason:
            terminated = f"chart exit at t={t:.17g}: {reason}"
            return False
        times.append(t)
        states.append(xn.copy())
        return True

    if method == "rk4":
        nsteps = int(np.ceil((t1 - t0) / dt - 1e-9))
        for k in range(1, nsteps + 1):
            t_prev = times[-1]
            t_next = min(t0 + k * dt, t1)
            try:
                xn = _rk4_step(field_fn, states[-1], t_next - t_prev)
            except SingularChart as exc:
                terminated = f"chart exit after t={t_prev:.17g}: {exc}"
                break
            if not accept(t_next, xn):
                break
    else:
        solver = RK45(lambda t, y: field_fn(y), t0, x, t1, max_step=dt, rtol=rtol, atol=atol)
        while solver.status == "running":
            try:
                msg = solver.step()
            except SingularChart as exc:
                terminated = f"chart exit after t={times[-1]:.17g}: {exc}"
                break
            if solver.status == "failed":
                raise StepRejectionLimit(msg or "adaptive step size underflow")
            if not accept(solver.t, solver.y):
                break

    traj = Trajectory(np.array(times), np.array(states), terminated=terminated)
    if monitors:
        traj.monitors = {name: np.array([fn(s) for s in traj.states]) for name, fn in monitors.items()}
    if terminated and strict:
        raise ChartExit(terminated, traj)
    return traj


def system_monitors(sys: ChartedSystem, side: str = "momentum") -> dict:
    """Named scalar functions of flat states: energy, registered integrals, diagnostics."""
    n = sys.n
    out = {}
    if side == "momentum":
        out["Hc"] = lambda x: constrained_hamiltonian(sys, PhasePoint(x[:n], x[n:]))

        def wrap(fn):
            return lambda x: float(fn(x[:n], x[n:]))

        for name, fn in {**sys.integrals, **sys.diagnostics}.items():
            out[name] = wrap(fn)
    elif side == "velocity":
        out["Ec"] = lambda x: constrained_energy(sys, VelocityPoint(x[:n], x[n:]))

        def wrap_v(fn):
            def g(x):
                pp = legendre_fwd(sys, VelocityPoint(x[:n], x[n:]))
                return float(fn(pp.q, pp.p))

            return g

        for name, fn in {**sys.integrals, **sys.diagnostics}.items():
            out[name] = wrap_v(fn)
    else:
        raise ValueError(f"unknown side {side!r}")
    return out


def monitor_suite(sys: ChartedSystem, traj: Trajectory) -> dict:
    if len(traj.times) == 0:
        raise ValueError("empty trajectory")
    mons = system_monitors(sys, traj.side)
    return {name: np.array([fn(s) for s in traj.states]) for name, fn in mons.items()}


def monitor_drifts(monitors: Mapping[str, np.ndarray]) -> dict:
    """Maximum absolute deviation of each series from its initial value."""
    return {name: float(np.max(np.abs(vals - vals[0]))) for name, vals in monitors.items()}


def write_csv(traj: Trajectory, n: int, path_or_file, monitors: Optional[Mapping[str, np.ndarray]] = None):
    """Write ``t, q1..qn, p1..pr`` (or ``v1..vr``) plus monitor columns, 17 significant digits."""
    monitors = traj.monitors if monitors is None else monitors
    dim = traj.states.shape[1]
    mom = "p" if traj.side == "momentum" else "v"
    header = ["t"] + [f"q{i + 1}" for i in range(n)] + [f"{mom}{a + 1}" for a in range(dim - n)]
    header += list(monitors)
    cols = [traj.times] + [traj.states[:, i] for i in range(dim)] + [np.asarray(v) for v in monitors.values()]

    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([format(float(v), ".17g") for v in row])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
            emit(fh)
    return header
