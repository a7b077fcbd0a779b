"""Reproducible random points inside the admitted region of the built-in charts.

Angles ``theta`` are drawn from ``[0.2, pi - 0.2]`` so the Euler-angle chart is
well conditioned; ``phi`` and ``psi`` from ``[0, 2 pi)``; planar contact
coordinates from ``[-2, 2]``; momenta and ``K`` componentwise from ``[-2, 2]``.
"""
from __future__ import annotations

import numpy as np

from ..legendre import PhasePoint
from .chaplygin import KGammaPoint

DEFAULT_SEED = 7
THETA_MARGIN = 0.2
BOX = 2.0


def rng_for(seed=None) -> np.random.Generator:
    return np.random.default_rng(DEFAULT_SEED if seed is None else seed)


def euler_angles(rng: np.random.Generator) -> np.ndarray:
    return np.array(
        [
            rng.uniform(0.0, 2 * np.pi),
            rng.uniform(THETA_MARGIN, np.pi - THETA_MARGIN),
            rng.uniform(0.0, 2 * np.pi),
        ]
    )


def suslov_points(count: int, seed=None) -> list:
    rng = rng_for(seed)
    return [PhasePoint(euler_angles(rng), rng.uniform(-BOX, BOX, 2)) for _ in range(count)]


def chaplygin_points(count: int, seed=None) -> list:
    rng = rng_for(seed)
    out = []
    for _ in range(count):
        q = np.concatenate([euler_angles(rng), rng.uniform(-BOX, BOX, 2)])
        out.append(PhasePoint(q, rng.uniform(-BOX, BOX, 3)))
    return out


def sphere_points(count: int, seed=None) -> list:
    """``(K, Gamma)`` with ``|Gamma| = 1`` and the polar angle inside the admitted band."""
    rng = rng_for(seed)
    out = []
    for _ in range(count):
        _, th, ps = euler_angles(rng)
        gamma = np.array([np.sin(th) * np.sin(ps), np.sin(th) * np.cos(ps), np.cos(th)])
        out.append(KGammaPoint(rng.uniform(-BOX, BOX, 3), gamma))
    return out
