"""Smallest n at which MAJORITY loses its quantum advantage for an even Bob group size k."""
import argparse
import logging
import time

from loccg.experiments import sweep_nk
from loccg.quantum import SolverConfig
from loccg.serialize import to_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, nargs="+", default=[2, 4, 6])
    ap.add_argument("--n-max", type=int, default=80)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-v", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO if args.v else logging.WARNING)

    rows = []
    for k in args.k:
        start = time.perf_counter()
        chk = sweep_nk(k, args.n_max, SolverConfig(seed=args.seed))
        elapsed = time.perf_counter() - start
        rows.append([k, chk.n if chk else "> n-max", chk.method if chk else "", elapsed])
    print(to_table(["k", "n_k", "certificate", "seconds"], rows), end="")


if __name__ == "__main__":
    main()
