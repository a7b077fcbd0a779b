"""Run every verification suite and write the reports as JSON."""
import argparse
import json
import sys
import time

from nhgyro import verification


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--suites", default="all", help="comma list of suite names, or all")
    ap.add_argument("--out", default="acceptance.json")
    args = ap.parse_args()

    names = list(verification.SUITES) if args.suites == "all" else args.suites.split(",")
    reports = []
    for name in names:
        t = time.perf_counter()
        rep = verification.run_suite(name, args.seed)
        elapsed = time.perf_counter() - t
        print(f"{'PASS' if rep.passed else 'FAIL'}  {name:<22} residual {rep.max_residual:.3e}  tol {rep.tolerance:.0e}  {elapsed:6.1f}s")
        reports.append({**rep.as_dict(), "seconds": elapsed})
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(reports, fh, indent=2)
    return 0 if all(r["pass"] for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
