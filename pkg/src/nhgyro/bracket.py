"""Nonholonomic almost-Poisson matrices, gauge transformations and diagnostics.

Phase-space points are ordered ``x = (q^1..q^n, p_1..p_r)``.  The bracket
matrix has blocks

    [[0,        rho_D],
     [-rho_D^T, -C^c_ab p_c - C^gamma_ab eta_gamma (+ gauge term)]]

where ``rho_D`` holds the first ``r`` frame columns.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .chart import ChartedSystem, central_jacobian, eta_frame, frame_at, structure_functions
from .errors import NonpositiveFactor, StepTooSmall
from .legendre import PhasePoint, constrained_block, inverse_metric_block

JACOBI_STEP = 1e-5
RANK_TOL = 1e-8


def _flat(x) -> np.ndarray:
    if isinstance(x, PhasePoint):
        return x.flat()
    return np.asarray(x, dtype=float)


def phase_labels(n: int, r: int) -> list:
    return [f"q{i + 1}" for i in range(n)] + [f"p{a + 1}" for a in range(r)]


@dataclass(frozen=True)
class BracketMatrix:
    pi: np.ndarray
    labels: Sequence[str] = ()

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float)
        if pi.ndim != 2 or pi.shape[0] != pi.shape[1]:
            raise ValueError("bracket matrix must be square")
        object.__setattr__(self, "pi", pi)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"x{i + 1}" for i in range(pi.shape[0])))

    def entry(self, a: str, b: str) -> float:
        """Bracket of two coordinate functions by label, e.g. ``entry("p1", "p2")``."""
        labels = list(self.labels)
        return float(self.pi[labels.index(a), labels.index(b)])

    def is_antisymmetric(self) -> bool:
        return bool(np.array_equal(self.pi, -self.pi.T))


def alternating_table(r: int, values: Optional[dict] = None) -> np.ndarray:
    """Fully alternating ``r x r x r`` array from values on increasing index triples.

    ``values`` maps 0-based ``(a, b, c)`` with ``a < b < c`` to ``lambda_abc``.
    """
    lam = np.zeros((r, r, r))
    for (a, b, c), val in (values or {}).items():
        if not a < b < c:
            raise ValueError("keys must be strictly increasing index triples")
        for (i, j, k), sign in (
            ((a, b, c), 1), ((b, c, a), 1), ((c, a, b), 1),
            ((b, a, c), -1), ((a, c, b), -1), ((c, b, a), -1),
        ):
            lam[i, j, k] = sign * val
    return lam


def random_alternating(rng: np.random.Generator, r: int, scale: float = 1.0) -> np.ndarray:
    values = {}
    for a in range(r):
        for b in range(a + 1, r):
            for c in range(b + 1, r):
                values[(a, b, c)] = scale * rng.uniform(-1.0, 1.0)
    return alternating_table(r, values)


def is_alternating(lam: np.ndarray, atol: float = 0.0) -> bool:
    lam = np.asarray(lam)
    perms = [(1, 0, 2), (0, 2, 1), (2, 1, 0)]
    return all(np.allclose(lam, -lam.transpose(p), rtol=0, atol=atol) for p in perms)


@dataclass(frozen=True)
class GaugeForm:
    """Coefficients ``lambda_abc(q)`` of a 3-form restricted to the constraint distribution."""

    coefficients: Callable[[np.ndarray], np.ndarray]
    r: int

    @classmethod
    def constant(cls, table) -> "GaugeForm":
        table = np.array(table, dtype=float)
        r = table.shape[0]
        if table.shape != (r, r, r) or not is_alternating(table):
            raise ValueError("gauge table must be a fully alternating r x r x r array")
        table.setflags(write=False)
        return cls(lambda q: table, r)

    @classmethod
    def zero(cls, r: int) -> "GaugeForm":
        return cls.constant(np.zeros((r, r, r)))

    def at(self, q) -> np.ndarray:
        return np.asarray(self.coefficients(np.asarray(q, dtype=float)), dtype=float)


def _pp_block(sys: ChartedSystem, q, p) -> np.ndarray:
    sd = structure_functions(sys, q)
    eta = eta_frame(sys, q)
    block = -np.einsum("cab,c->ab", sd.parallel, p)
    if sys.r < sys.n:
        block -= np.einsum("gab,g->ab", sd.transverse, eta[sys.r :])
    return block


def _assemble(sys: ChartedSystem, q, pp_block) -> np.ndarray:
    n, r = sys.n, sys.r
    rho = frame_at(sys, q)
    pi = np.zeros((n + r, n + r))
    pi[:n, n:] = rho[:, :r]
    pi[n:, :n] = -rho[:, :r].T
    # keep the momentum block exactly antisymmetric
    pi[n:, n:] = 0.5 * (pp_block - pp_block.T)
    return pi


def assemble_pi(sys: ChartedSystem, pp: PhasePoint) -> BracketMatrix:
    pi = _assemble(sys, pp.q, _pp_block(sys, pp.q, pp.p))
    return BracketMatrix(pi, tuple(phase_labels(sys.n, sys.r)))


def gauge_block(sys: ChartedSystem, gauge: GaugeForm, pp: PhasePoint) -> np.ndarray:
    """``lambda_abc g^{cd} (p_d - eta_d)``."""
    _, eta = constrained_block(sys, pp.q)
    ginv = inverse_metric_block(sys, pp.q)
    return np.einsum("abc,c->ab", gauge.at(pp.q), ginv @ (pp.p - eta))


def assemble_pi_gauge(sys: ChartedSystem, gauge: GaugeForm, pp: PhasePoint) -> BracketMatrix:
    if gauge.r != sys.r:
        raise ValueError(f"gauge form has rank {gauge.r}, system has r={sys.r}")
    block = _pp_block(sys, pp.q, pp.p) + gauge_block(sys, gauge, pp)
    return BracketMatrix(_assemble(sys, pp.q, block), tuple(phase_labels(sys.n, sys.r)))


def bracket_eval(bm: BracketMatrix, dF, dG) -> float:
    return float(np.asarray(dF, dtype=float) @ bm.pi @ np.asarray(dG, dtype=float))


@dataclass(frozen=True)
class BracketField:
    """A bracket matrix as a function of the phase-space point."""

    matrix: Callable[[np.ndarray], np.ndarray]
    dim: int
    labels: Sequence[str] = ()
    system: Optional[ChartedSystem] = None
    gauge: Optional[GaugeForm] = None
    factor: Optional[Callable[[np.ndarray], float]] = None
    meta: dict = field(default_factory=dict)

    def __call__(self, x) -> BracketMatrix:
        x = _flat(x)
        pi = np.asarray(self.matrix(x), dtype=float)
        if self.factor is not None:
            f = float(self.factor(x))
            if not f > 0:
                raise NonpositiveFactor(f"conformal factor {f!r} at {x}")
            pi = f * pi
        return BracketMatrix(pi, tuple(self.labels))


def bracket_field(sys: ChartedSystem, gauge: Optional[GaugeForm] = None) -> BracketField:
    n = sys.n

    def matrix(x):
        pp = PhasePoint(x[:n], x[n:])
        if gauge is None:
            return assemble_pi(sys, pp).pi
        return assemble_pi_gauge(sys, gauge, pp).pi

    return BracketField(matrix, n + sys.r, tuple(phase_labels(n, sys.r)), system=sys, gauge=gauge)


def matrix_field(fn: Callable, dim: int, labels: Sequence[str] = ()) -> BracketField:
    return BracketField(fn, dim, tuple(labels) or tuple(f"x{i + 1}" for i in range(dim)))


def gradient(H: Callable, x) -> np.ndarray:
    x = _flat(x)
    return central_jacobian(lambda y: np.array(H(y)), x)


def hamiltonian_field(bf: BracketField, H: Callable, x, grad: Optional[Callable] = None) -> np.ndarray:
    """``Pi(x) . dH(x)``; ``grad`` overrides the central-difference gradient."""
    x = _flat(x)
    dH = np.asarray(grad(x), dtype=float) if grad is not None else gradient(H, x)
    return bf(x).pi @ dH


def jacobiator_tensor(bf: BracketField, x, h: float = JACOBI_STEP) -> np.ndarray:
    """All components ``J[i, j, k] = {x_i,{x_j,x_k}} + cyclic``.

    ``{x_i, F}`` is the derivative of ``F`` along the row ``Pi[i, :]``, taken
    by central differences with step ``h * max(1, |x|_inf)`` along the unit
    direction.
    """
    x = _flat(x)
    scale = max(1.0, float(np.max(np.abs(x))))
    step = h * scale
    if not step > 1e-13 * scale:
        raise StepTooSmall(f"step {step!r} too small at scale {scale!r}")
    pi0 = bf(x).pi
    dim = x.size
    dpi = np.zeros((dim, dim, dim))
    for i in range(dim):
        d = pi0[i]
        norm = np.linalg.norm(d)
        if norm == 0.0:
            continue
        u = d / norm
        if np.array_equal(x + step * u, x):
            raise StepTooSmall("finite-difference step does not move the point")
        dpi[i] = norm * (bf(x + step * u).pi - bf(x - step * u).pi) / (2 * step)
    return dpi + dpi.transpose(1, 2, 0) + dpi.transpose(2, 0, 1)


def jacobiator(bf: BracketField, i: int, j: int, k: int, x, h: float = JACOBI_STEP) -> float:
    return float(jacobiator_tensor(bf, x, h)[i, j, k])


def casimir_residual(bf: BracketField, dF, x) -> float:
    return float(np.max(np.abs(bf(x).pi @ np.asarray(dF, dtype=float))))


def rank(bm: BracketMatrix, tol: float = RANK_TOL) -> int:
    s = np.linalg.svd(bm.pi, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s >= tol * s[0]))


def conformal_scale(bf: BracketField, f: Callable, samples: Sequence = ()) -> BracketField:
    """Multiply the field pointwise by ``f``; ``samples`` are checked for ``f > 0`` up front."""
    for x in samples:
        val = float(f(_flat(x)))
        if not val > 0:
            raise NonpositiveFactor(f"conformal factor {val!r} at sampled point {x}")
    inner = bf.factor
    if inner is None:
        combined = f
    else:
        def combined(x):
            return inner(x) * f(x)
    return replace(bf, factor=combined, meta={**bf.meta, "conformal_factor": f})


def pushforward(bm: BracketMatrix, jac, labels: Sequence[str] = ()) -> BracketMatrix:
    """Bracket of new coordinates ``y(x)`` given the Jacobian ``dy/dx``."""
    jac = np.asarray(jac, dtype=float)
    out = jac @ bm.pi @ jac.T
    return BracketMatrix(0.5 * (out - out.T), tuple(labels))
