"""MAJORITY split into two equal halves: classical closed form, exact optimum and SDP value.

The closed form only describes a particular strategy; the brute-force column
is the true classical optimum, so both gaps are reported.
"""
import argparse
import sys

from loccg.experiments import majority_scaling
from loccg.quantum import SolverConfig
from loccg.serialize import to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=24)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-o", "--out")
    args = ap.parse_args()

    rows = [
        [r.n, r.vc_formula, r.vc_bruteforce, r.vq, r.gap, r.gap_bruteforce, r.certified]
        for r in majority_scaling(args.n_max, SolverConfig(seed=args.seed))
    ]
    header = ["n", "vc_formula", "vc_bruteforce", "vq", "gap", "gap_bruteforce", "certified"]
    text = to_csv(header, rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
