"""CPS simulation on random EPCF programs at a given depth."""

import argparse
import sys
import time

from effectree import cps, randprog as R
from effectree import syntax as S


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-n", type=int, default=200)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--max-size", type=int, default=30)
    args = p.parse_args()
    sys.setrecursionlimit(20000)
    start = time.perf_counter()
    bad = unknown = 0
    for c in R.random_programs(args.seed, args.n, args.max_size):
        r = cps.simulation_check(R.SIGNATURE, c, None, args.depth)
        unknown += r.tolerated_unknowns
        if not r.equal:
            bad += 1
            print(f"mismatch at {r.mismatch}: {S.show(c)}")
    print(f"{args.n} programs, {bad} mismatches, {unknown} Unknowns tolerated, {time.perf_counter() - start:.2f}s")
    sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()
