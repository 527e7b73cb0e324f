"""GMRES finite termination and rank-one iteration doubling at several tolerances."""

import argparse
from collections import Counter

from eiglab.krylov import SENSITIVITY_TOLS
from eiglab.suites import doubling_suite, termination_suite


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    status = 0
    for tol in SENSITIVITY_TOLS:
        term = termination_suite(args.trials, args.seed, tol=tol)
        exact = sum(it == k for k, it in term)
        reports = doubling_suite(args.trials, args.seed, tol=tol)
        failures = Counter(r.failure.split(":")[0] for r in reports if r.failure)
        ratios = Counter(round(r.ratio, 2) for r in reports if r.passed)
        print(f"tol {tol:g}")
        print(f"  convergedAt == |Lambda(A)|  {exact}/{len(term)}")
        print(f"  itersC <= 2 itersA          {sum(r.passed for r in reports)}/{len(reports)}")
        print(f"  max block <= |Lambda(A)|    {sum(r.block_ok for r in reports)}/{len(reports)}")
        print(f"  failures                    {dict(failures) or 'none'}")
        print(f"  itersC/itersA histogram     {dict(sorted(ratios.items()))}")
        if failures:
            status = 2
    return status


if __name__ == "__main__":
    raise SystemExit(main())
