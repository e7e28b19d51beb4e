"""Step-level CPS simulation over many random steps: how many need more than
two administrative steps?"""

import argparse
import sys

from effectree import cps, randprog as R
from effectree import syntax as S


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--per-seed", type=int, default=20)
    p.add_argument("--show", type=int, default=3, help="print this many strict failures")
    args = p.parse_args()
    sys.setrecursionlimit(20000)
    total = strict = relaxed = lowered = 0
    for seed in range(args.seeds):
        for before, after in R.random_steps(seed, args.per_seed):
            r = cps.check_step_simulation(R.SIGNATURE, before, after)
            total += 1
            strict += r.strict
            relaxed += r.relaxed
            lowered += not r.relaxed and R.lowers_let_type(R.SIGNATURE, before, after)
            if not r.strict and total - strict <= args.show:
                print(f"seed {seed}: {S.show(before)}\n  -> {S.show(after)}")
    print(f"{total} steps: {strict} within two administrative steps, {relaxed} with leading continuation steps; "
          f"{lowered} of the rest lower a let-bound type")


if __name__ == "__main__":
    main()
