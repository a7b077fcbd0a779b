"""Euler angles (x-convention) on SO(3): attitude matrix and angular-velocity maps.

Coordinates are ordered ``(phi, theta, psi)``.
"""
from __future__ import annotations

import numpy as np

SIN_THETA_MIN = 1e-6


def rotation(phi: float, theta: float, psi: float) -> np.ndarray:
    cf, sf = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(psi), np.sin(psi)
    return np.array(
        [
            [cp * cf - ct * sf * sp, -sp * cf - ct * sf * cp, st * sf],
            [cp * sf + ct * cf * sp, -sp * sf + ct * cf * cp, -st * cf],
            [st * sp, st * cp, ct],
        ]
    )


def body_rate_matrix(theta: float, psi: float) -> np.ndarray:
    """``J`` with ``Omega = J (phi', theta', psi')``; independent of ``phi``."""
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(psi), np.sin(psi)
    return np.array(
        [
            [sp * st, cp, 0.0],
            [cp * st, -sp, 0.0],
            [ct, 0.0, 1.0],
        ]
    )


def body_rate_matrix_jacobian(theta: float, psi: float) -> np.ndarray:
    """``dJ[i, j, k]`` with ``k`` ranging over ``(phi, theta, psi)``."""
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(psi), np.sin(psi)
    d = np.zeros((3, 3, 3))
    d[:, :, 1] = [[sp * ct, 0.0, 0.0], [cp * ct, 0.0, 0.0], [-st, 0.0, 0.0]]
    d[:, :, 2] = [[cp * st, -sp, 0.0], [-sp * st, -cp, 0.0], [0.0, 0.0, 0.0]]
    return d


def space_rate_matrix(phi: float, theta: float) -> np.ndarray:
    """``omega = S (phi', theta', psi')``, angular velocity in space coordinates."""
    cf, sf = np.cos(phi), np.sin(phi)
    ct, st = np.cos(theta), np.sin(theta)
    return np.array(
        [
            [0.0, cf, sf * st],
            [0.0, sf, -cf * st],
            [1.0, 0.0, ct],
        ]
    )


def body_angular_velocity(angles, rates) -> np.ndarray:
    _, theta, psi = angles
    return body_rate_matrix(theta, psi) @ np.asarray(rates, dtype=float)


def space_angular_velocity(angles, rates) -> np.ndarray:
    phi, theta, _ = angles
    return space_rate_matrix(phi, theta) @ np.asarray(rates, dtype=float)


def poisson_vector(theta: float, psi: float) -> np.ndarray:
    """``Gamma = R^{-1} e_3`` in Euler angles."""
    st = np.sin(theta)
    return np.array([st * np.sin(psi), st * np.cos(psi), np.cos(theta)])


def theta_guard(theta: float):
    if abs(np.sin(theta)) < SIN_THETA_MIN:
        return f"|sin(theta)| = {abs(np.sin(theta)):.3e} below {SIN_THETA_MIN:g} (Euler-angle chart singular)"
    return None
