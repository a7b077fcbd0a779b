"""Energy drift of the Suslov problem versus step size.

Fixed-step RK4 should show drift falling roughly like dt^4 until roundoff
takes over.
"""
import argparse

import numpy as np

from nhgyro.dynamics import chart_guard, integrate, momentum_field, monitor_drifts, system_monitors
from nhgyro.legendre import PhasePoint
from nhgyro.systems import suslov as su


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t1", type=float, default=20.0)
    ap.add_argument("--steps", default="0.1,0.05,0.025,0.0125,0.00625")
    args = ap.parse_args()

    p = su.SuslovParams()
    sys_ = su.suslov_system(p)
    pp = PhasePoint(np.array([0.0, np.pi / 2, 0.0]), su.suslov_momenta_from_omega(p, (1.0, 0.0)))
    mons = {"Hc": system_monitors(sys_)["Hc"]}
    prev = None
    print(f"{'dt':>10} {'max |dHc|':>12} {'ratio':>8}")
    for dt in (float(s) for s in args.steps.split(",")):
        traj = integrate(momentum_field(sys_), pp.flat(), 0.0, args.t1, dt, guard=chart_guard(sys_), monitors=mons)
        drift = monitor_drifts(traj.monitors)["Hc"]
        ratio = "" if prev is None or drift == 0 else f"{prev / drift:8.1f}"
        print(f"{dt:10.5f} {drift:12.3e} {ratio:>8}" + (f"  ({traj.terminated})" if traj.terminated else ""))
        prev = drift


if __name__ == "__main__":
    main()
