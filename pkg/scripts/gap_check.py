"""Observed generalization gap against the certified remainder over many seeds.

Prints CSV with one row per seed; exits 1 if any gap exceeds its remainder.
"""
import argparse
import csv
import sys

from stemvine.oracle.suites import gap_run


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--n-train", type=int, default=200)
    parser.add_argument("--n-test", type=int, default=2000)
    parser.add_argument("--lam", type=float, default=1.0)
    parser.add_argument("--delta", type=float, default=0.05)
    args = parser.parse_args()
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["seed", "train_error", "test_error", "ramp_risk", "gap", "remainder", "R"])
    bad = 0
    for seed in range(args.seeds):
        run = gap_run(seed, args.n_train, args.n_test, args.lam, args.delta)
        bad += not run.ok
        writer.writerow([seed, run.train_error, run.test_error, repr(run.ramp), repr(run.gap),
                         repr(run.remainder), repr(run.report.R)])
    sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()
