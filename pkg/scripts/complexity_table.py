"""Required measurements per K log(N/delta) as alpha -> 0+, against gamma K.

Prints the exact coefficient, its large-K approximation K / (1 - e^(-gamma K))
and the worst case over alpha, each divided by K.

    python scripts/complexity_table.py --k 10 100 1000
"""
import argparse
import csv
import sys

from sparsecc.analysis import ComplexityQuery, measurements_alpha0, measurements_worst


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--k", type=int, nargs="+", default=[10, 100])
    p.add_argument("--lambdas", default="0.1,0.25,0.5,1,2,3,5,10")
    args = p.parse_args(argv)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["K", "gammaK", "exact_over_K", "approx_over_K", "worst_over_K"])
    for k in args.k:
        worst = measurements_worst(k, 10, 0.1).coefficient / k
        for lam in (float(v) for v in args.lambdas.split(",")):
            if lam > k:
                continue
            r = measurements_alpha0(ComplexityQuery(k, 10, 0.1, gamma=lam / k))
            w.writerow([k, lam, repr(r.coefficient / k), repr(r.coefficient_approx / k), repr(worst)])


if __name__ == "__main__":
    main()
