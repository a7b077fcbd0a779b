"""Jacobiator of the reduced Chaplygin-sphere bracket before and after rescaling.

Samples points on the sphere bundle, evaluates the largest Jacobiator
component of the reduced bracket and of its conformally rescaled version.
Points with ``|Gamma| = 0.9`` and ``1.1`` are probed as well, since
``|Gamma|^2`` is a Casimir and every level set is invariant.
"""
import argparse

import numpy as np

from nhgyro.bracket import conformal_scale, jacobiator_tensor, matrix_field
from nhgyro.systems import chaplygin as ch
from nhgyro.systems.sampling import sphere_points


def fields(p):
    bf = matrix_field(lambda x: ch.chaplygin_reference_bracket(p, ch.KGammaPoint.from_flat(x)), 6, ch.KGAMMA_LABELS)
    return bf, conformal_scale(bf, lambda y: ch.conformal_factor(p, y[3:]))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=20)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--m", type=float, default=1.0)
    ap.add_argument("--r", type=float, default=1.0)
    args = ap.parse_args()

    p = ch.ChaplyginParams(m=args.m, r_s=args.r)
    raw, scaled = fields(p)
    for radius in (1.0, 0.9, 1.1):
        worst_raw = worst_scaled = 0.0
        for kg in sphere_points(args.points, args.seed):
            x = np.concatenate([kg.K, radius * kg.Gamma])
            worst_raw = max(worst_raw, np.abs(jacobiator_tensor(raw, x)).max())
            worst_scaled = max(worst_scaled, np.abs(jacobiator_tensor(scaled, x)).max())
        print(f"|Gamma| = {radius:.1f}: unscaled {worst_raw:.3e}, rescaled {worst_scaled:.3e}")


if __name__ == "__main__":
    main()
