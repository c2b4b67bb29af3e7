"""MAJORITY with Bob holding two players: quantum vs classical values for n = 4..10."""
import argparse
import math

from loccg.experiments import table3
from loccg.quantum import SolverConfig
from loccg.serialize import to_csv, to_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", help="also write the rows to this file")
    args = ap.parse_args()

    rows = table3(SolverConfig(seed=args.seed))
    header = ["n", "vq", "vc", "ratio", "certified", "cos_theta1", "cos_theta2"]
    body = []
    for r in rows:
        cos = [math.cos(a) for a in r.thetaA[1:3]] or [None, None]
        body.append([r.n, r.vq, r.vc, r.ratio, r.certified] + cos)
    print(to_table(header, body), end="")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(to_csv(header, body))


if __name__ == "__main__":
    main()
