"""Train the blob network at several weight-decay strengths and certify each run.

Prints CSV: weight_decay, sum of spectral norms, R, bound, train error.
"""
import argparse
import csv
import sys

from stemvine.oracle.suites import weight_decay_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--decays", default="0,0.001,0.01,0.1,1")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epochs", type=int, default=200)
    args = parser.parse_args()
    decays = [float(x) for x in args.decays.split(",")]
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["weight_decay", "spectral_sum", "R", "bound", "train_error"])
    for row in weight_decay_sweep(decays, seed=args.seed, epochs=args.epochs):
        writer.writerow([row.weight_decay, repr(row.spectral_sum), repr(row.R), repr(row.bound), row.train_error])


if __name__ == "__main__":
    main()
