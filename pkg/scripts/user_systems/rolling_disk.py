"""Vertical disk rolling without slipping, as a user system file for ``nhgyro --system``.

Coordinates ``(x, y, phi, psi)``: contact point, heading and rolling angle.
Rolling forces ``xdot = R cos(phi) psidot`` and ``ydot = R sin(phi) psidot``.

    nhgyro simulate --system scripts/user_systems/rolling_disk.py --set R=0.5 --t 0:5:0.01
"""
import numpy as np

from nhgyro.chart import ChartedSystem
from nhgyro.legendre import PhasePoint

DEFAULTS = {"m": 1.0, "R": 1.0, "I": 0.5, "J": 0.25}


def _params(params):
    unknown = set(params) - set(DEFAULTS)
    if unknown:
        raise ValueError(f"unknown parameters {sorted(unknown)}")
    return {**DEFAULTS, **params}


def make_system(params):
    p = _params(params)
    m, R, I, J = p["m"], p["R"], p["I"], p["J"]

    def frame(q):
        c, s = np.cos(q[2]), np.sin(q[2])
        return np.array(
            [
                [0.0, R * c, -s, c],
                [0.0, R * s, c, s],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, -m * R / I],
            ]
        )

    def frame_jacobian(q):
        c, s = np.cos(q[2]), np.sin(q[2])
        D = np.zeros((4, 4, 4))
        D[:, :, 2] = [[0.0, -R * s, -c, -s], [0.0, R * c, -s, c], [0.0] * 4, [0.0] * 4]
        return D

    return ChartedSystem(
        n=4,
        r=2,
        frame=frame,
        frame_jacobian=frame_jacobian,
        metric_coords=lambda q: np.diag([m, m, J, I]),
        metric_jacobian=lambda q: np.zeros((4, 4, 4)),
        name="rolling-disk",
    )


def initial_state(params):
    # spinning about the vertical while rolling forward
    return PhasePoint(np.zeros(4), np.array([0.5, 1.0]))
