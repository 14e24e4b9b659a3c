"""Median recovery error over an (alpha, 1/gamma, nu) grid, written as CSV.

Defaults give a desk-scale version of the binary-signal sweep (N = 10^4,
K = 10, 20 trials per cell); pass ``--trials 100`` for the full protocol.

    python scripts/recovery_sweep.py --out sweep.csv --workers 4
"""
import argparse
import sys

from sparsecc.cli import cells_to_csv
from sparsecc.experiments import ExperimentConfig, run_experiment


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--signal", default="binary", choices=("binary", "folded_gaussian"))
    p.add_argument("--alphas", default="0.05,0.1,0.2,0.3,0.5,0.7,0.9")
    p.add_argument("--inv-gammas", default="1,2,5,10")
    p.add_argument("--nus", default="0.8,1.0,1.2,1.5,2.0")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-")
    args = p.parse_args(argv)

    floats = lambda s: tuple(float(v) for v in s.split(","))  # noqa: E731
    config = ExperimentConfig(
        n=args.n, k=args.k, signal_kind=args.signal, nu_list=floats(args.nus),
        alpha_list=floats(args.alphas), inv_gamma_list=floats(args.inv_gammas),
        trials=args.trials, master_seed=args.seed,
    )
    text = cells_to_csv(run_experiment(config, workers=args.workers))
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)


if __name__ == "__main__":
    main()
