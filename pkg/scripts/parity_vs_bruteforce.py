"""Random parity games: Zielonka against exhaustive positional strategies."""

import argparse
import random

from effectree import parity as P


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-n", type=int, default=2000)
    p.add_argument("--vertices", type=int, default=8)
    p.add_argument("--priorities", type=int, default=4)
    args = p.parse_args()
    rng = random.Random(args.seed)
    bad = 0
    for _ in range(args.n):
        k = rng.randint(1, args.vertices)
        g = P.ParityGame(tuple(rng.randrange(2) for _ in range(k)),
                         tuple(rng.randint(0, args.priorities) for _ in range(k)),
                         tuple(tuple(sorted(set(rng.choices(range(k), k=rng.randint(1, 3))))) for _ in range(k)))
        sol = P.solve_parity(g)
        if sol.winner != P.brute_force_winner(g) or not P.check_strategy(g, sol):
            bad += 1
            print(g)
    print(f"{args.n} games, {bad} disagreements")


if __name__ == "__main__":
    main()
