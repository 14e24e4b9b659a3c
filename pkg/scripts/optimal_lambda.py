"""Optimal sparsity level lambda* = gamma K and the implied K/h over an alpha grid.

For each (alpha, epsilon) the script reports h at lambda = 1, lambda = 2 and
at the optimum, so the gain of tuning gamma can be read off one table.

    python scripts/optimal_lambda.py --epsilons 0.1,0.5,1 > lambda.csv
"""
import argparse
import csv
import sys

import numpy as np

from sparsecc.analysis import h_poisson, optimize_lambda


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alphas", default=",".join(f"{a:.2f}" for a in np.arange(0.05, 1.0, 0.05)))
    p.add_argument("--epsilons", default="0.1,0.5,1.0")
    args = p.parse_args(argv)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["alpha", "epsilon", "lambda_star", "inv_h_star", "inv_h_lambda1", "inv_h_lambda2"])
    for eps in (float(v) for v in args.epsilons.split(",")):
        for a in (float(v) for v in args.alphas.split(",")):
            lam, h = optimize_lambda(eps, a)
            w.writerow([a, eps, repr(lam), repr(1 / h),
                        repr(1 / h_poisson(1.0, eps, a)), repr(1 / h_poisson(2.0, eps, a))])


if __name__ == "__main__":
    main()
