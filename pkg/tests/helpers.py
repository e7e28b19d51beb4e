"""Random well-typed λY terms for property tests."""

import random

from effectree import lambda_y as L
from effectree.binding import Var

SIG = L.Signature({"g": 2, "f": 1, "a": 0})
OO = L.Arrow(L.O, L.O)
TYPES = (L.O, OO)


class LYGen:
    def __init__(self, rng: random.Random, prefix: str = "v") -> None:
        self.rng = rng
        self.prefix = prefix
        self.n = 0

    def fresh(self) -> str:
        self.n += 1
        return f"{self.prefix}{self.n}"

    def term(self, ctx: dict, t: L.LYType, fuel: int):
        rng = self.rng
        vars_ = sorted(x for x, s in ctx.items() if s == t)
        r = rng.random()
        if vars_ and (fuel <= 0 or r < 0.3):
            return Var(rng.choice(vars_))
        if fuel <= 0:
            return self.closed_base(t)
        if isinstance(t, L.Arrow) and r < 0.6:
            x = self.fresh()
            return L.Lam(x, t.dom, self.term({**ctx, x: t.dom}, t.cod, fuel - 1))
        if r < 0.7:
            return L.Y(self.term(ctx, L.Arrow(t, t), fuel - 1))
        if t == L.O and r < 0.9:
            name = rng.choice(sorted(SIG.entries))
            return L.apply(L.Const(name), *(self.term(ctx, L.O, fuel - 1) for _ in range(SIG.arity(name))))
        s = rng.choice(TYPES)
        return L.App(self.term(ctx, L.Arrow(s, t), fuel - 1), self.term(ctx, s, fuel - 1))

    def closed_base(self, t: L.LYType):
        if t == L.O:
            return L.Const("a")
        x = self.fresh()
        return L.Lam(x, t.dom, self.closed_base(t.cod))


def random_ly(seed: int, t: L.LYType = L.O, ctx: dict | None = None, fuel: int = 5, prefix: str = "v"):
    return LYGen(random.Random(seed), prefix).term(dict(ctx or {}), t, fuel)
