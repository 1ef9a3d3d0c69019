"""Radius expansion, R and the bound for the 34-layer ResNet template as s and b vary.

Prints CSV: s, b, alpha_bar, R, bound at the given sample size.
"""
import argparse
import csv
import sys

from stemvine.bounds import propagate_radii, total_R
from stemvine.cert import generalization_bound
from stemvine.graph import uniform_resnet34


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--s", default="0.5,1,1.5,2")
    parser.add_argument("--b", default="0.01,0.1,1")
    parser.add_argument("--width", type=int, default=64)
    parser.add_argument("--input-norm", type=float, default=1.0)
    parser.add_argument("--n", type=int, default=50_000)
    parser.add_argument("--delta", type=float, default=0.05)
    args = parser.parse_args()
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["s", "b", "alpha_bar", "R", "bound"])
    for s in map(float, args.s.split(",")):
        for b in map(float, args.b.split(",")):
            net = uniform_resnet34(s, b, args.width)
            R = total_R(net, args.input_norm)
            writer.writerow([s, b, repr(propagate_radii(net).alpha_bar), repr(R),
                             repr(generalization_bound(0.0, R, args.n, args.delta))])


if __name__ == "__main__":
    main()
