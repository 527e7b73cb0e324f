"""Deflated Newton on the double-well KKT toy problem, with the preconditioned
rank-one check at random points."""

import argparse

import numpy as np

from eiglab.deflation import DeflationState, deflated_search, double_well_kkt
from eiglab.suites import deflation_doubling_suite, saddle_spectrum_suite


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--problem-seed", type=int, default=0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--power", type=float, default=2.0)
    parser.add_argument("--points", type=int, default=50)
    parser.add_argument("--u0", type=float, default=0.1, help="every component of the start point")
    args = parser.parse_args()

    problem = double_well_kkt(seed=args.problem_seed)
    u0 = np.full(problem.n, args.u0)
    found = deflated_search(problem, u0, max_roots=10, power=args.power)
    print(f"{len(found)} roots from u0 = {args.u0} * ones")
    for i, r in enumerate(found):
        x = np.array2string(r.root[:6], precision=4, suppress_small=True)
        print(f"  root {i}: x = {x}  ||F|| = {r.residual_norm:.1e}  newton its = {r.iterations}")
    if not found:
        return 2

    reports = deflation_doubling_suite(problem, DeflationState([found[0].root], args.power), args.points, args.seed)
    worst = max(r.sigma_ratio for r in reports)
    print(f"doubling passes     {sum(r.passed for r in reports)}/{len(reports)}")
    print(f"max sigma2/sigma1   {worst:.1e}")
    counts = saddle_spectrum_suite(50, args.seed)
    print(f"P^-1 J with 3 distinct eigenvalues: {sum(c == 3 for c in counts)}/50")
    return 0 if all(r.passed for r in reports) else 2


if __name__ == "__main__":
    raise SystemExit(main())
