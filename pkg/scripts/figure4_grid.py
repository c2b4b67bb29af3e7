"""Winning probability of the optimal (n-1, 1) protocol over n and integer thresholds t.

Writes CSV (n, t, vq, winning_probability); plotting is left to other tools.
"""
import argparse
import sys

from loccg.experiments import grid
from loccg.serialize import to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=20)
    ap.add_argument("-o", "--out", help="output file (default stdout)")
    args = ap.parse_args()

    rows = [[r.n, r.t, r.vq, r.winning_probability] for r in grid(args.n_max)]
    text = to_csv(["n", "t", "vq", "winning_probability"], rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
