"""Random well-typed EPCF programs over Flip / Get / Set / Raise."""

from __future__ import annotations

import random

from effectree import effects as E
from effectree.binding import Term, Var, size, subst

SIGNATURE = E.EffectSignature(
    {"Loc": ("l0", "l1"), "LocBool": ("l0.tt", "l0.ff", "l1.tt", "l1.ff")},
    {"Flip": (E.UNIT, 2), "Get": ("Loc", 2), "Set": ("LocBool", 1), "Raise": (E.UNIT, 0)},
)
TWO = E.Enum(2)
FUN = E.Arrow(TWO, TWO)
THUNK = E.Arrow(E.UnitT, TWO)
TYPES = (TWO, E.UnitT, FUN)


class _Gen:
    def __init__(self, rng: random.Random) -> None:
        self.rng = rng
        self.counter = 0

    def fresh(self, base: str) -> str:
        self.counter += 1
        return f"{base}{self.counter}"

    def value(self, ctx: dict, t: E.EffType, fuel: int) -> Term:
        rng = self.rng
        vars_ = [x for x, s in ctx.items() if s == t]
        if vars_ and rng.random() < 0.6:
            return Var(rng.choice(vars_))
        match t:
            case E.Enum(k=k):
                return E.Num(rng.randrange(k), k)
            case E.Base(name=b):
                return E.Const(rng.choice(SIGNATURE.bases[b]))
            case E.Arrow(dom=d, cod=c):
                x = self.fresh("x")
                return E.Lam(x, d, self.comp({**ctx, x: d}, c, max(fuel - 2, 0)))
        raise TypeError(t)

    def comp(self, ctx: dict, t: E.EffType, fuel: int) -> Term:
        rng = self.rng
        if fuel <= 0:
            return E.Return(self.value(ctx, t, 0)) if rng.random() < 0.9 else E.Op("Raise", E.Const("()"), "_", None)
        choices = ["return", "flip", "get", "set", "raise", "let", "case", "app", "fun", "loop"]
        weights = [2, 3, 2, 2, 1, 2, 2, 2, 1, 1]
        kind = rng.choices(choices, weights)[0]
        sub = fuel - 1
        match kind:
            case "return":
                return E.Return(self.value(ctx, t, sub))
            case "flip" | "get":
                x = self.fresh("b")
                op, p = ("Flip", E.Const("()")) if kind == "flip" else ("Get", E.Const(rng.choice(("l0", "l1"))))
                return E.Op(op, p, x, self.comp({**ctx, x: TWO}, t, sub))
            case "set":
                p = E.Const(rng.choice(SIGNATURE.bases["LocBool"]))
                return E.Op("Set", p, self.fresh("_u"), self.comp(ctx, t, sub))
            case "raise":
                return E.Op("Raise", E.Const("()"), "_", None)
            case "let":
                s = rng.choice(TYPES)
                x = self.fresh("y")
                m = self.comp(ctx, s, sub // 2)
                # a Raise-only computation binds x at Never; keep it out of scope
                bound = {**ctx, x: s} if E.Checker(SIGNATURE).comp(ctx, m, None) == s else ctx
                return E.Let(x, m, self.comp(bound, t, sub // 2))
            case "case":
                scr = [x for x, s in ctx.items() if s == TWO]
                v = Var(rng.choice(scr)) if scr else E.Num(rng.randrange(2), 2)
                return E.Case(v, (self.comp(ctx, t, sub // 2), self.comp(ctx, t, sub // 2)))
            case "app" if t == TWO:
                fs = [x for x, s in ctx.items() if s == FUN]
                f = Var(rng.choice(fs)) if fs else self.value(ctx, FUN, sub // 2)
                return E.App(f, self.value(ctx, TWO, 0))
            case "fun":
                f = self.fresh("f")
                return E.Let(f, E.Return(self.value(ctx, FUN, sub // 2)), self.comp({**ctx, f: FUN}, t, sub // 2))
            case "loop" if t == TWO:
                # let g = fix g. λu. C in g (), where C may call g again
                g, u = self.fresh("g"), self.fresh("u")
                inner = {**ctx, g: THUNK, u: E.UnitT}
                body = self.comp(inner, TWO, sub // 2)
                if rng.random() < 0.5:
                    b = self.fresh("b")
                    body = E.Op("Flip", E.Const("()"), b, E.Case(Var(b), (body, E.App(Var(g), Var(u)))))
                loop = E.Fix(g, THUNK, E.Lam(u, E.UnitT, body))
                return E.App(loop, E.Const("()"))
        return E.Return(self.value(ctx, t, sub))


def random_program(rng: random.Random, max_size: int = 30, fuel: int = 8) -> Term:
    """A closed EPCF computation of type 2 with at most ``max_size`` nodes."""
    while True:
        term = _Gen(rng).comp({}, TWO, fuel)
        if size(term) <= max_size:
            E.typecheck_epcf(SIGNATURE, {}, term)
            return term


def random_programs(seed: int, n: int, max_size: int = 30) -> list[Term]:
    rng = random.Random(seed)
    return [random_program(rng, max_size) for _ in range(n)]


def random_steps(seed: int, n: int, max_size: int = 30, walk: int = 40) -> list[tuple[Term, Term]]:
    """``n`` single steps ``C → B`` sampled from random executions, descending
    into a random branch at each operation."""
    rng = random.Random(seed)
    pairs: list[tuple[Term, Term]] = []
    while len(pairs) < n:
        c = random_program(rng, max_size)
        trace = []
        for _ in range(walk):
            out = E.step(c, SIGNATURE)
            match out:
                case E.Stepped(comp=b):
                    trace.append((c, b))
                    c = b
                case E.NormalOp(op=op, var=x, body=body) if body is not None:
                    c = subst(body, x, E.Num(rng.randrange(SIGNATURE.arity(op)), SIGNATURE.arity(op)))
                case _:
                    break
        pairs.extend(rng.sample(trace, min(len(trace), 3, n - len(pairs))))
    return pairs


def _let_types(sig: E.EffectSignature, c: Term, ctx: dict, out: dict) -> dict:
    match c:
        case E.Let(var=x, comp=m, body=b):
            out[x] = E.Checker(sig).comp(ctx, m, None)
            _let_types(sig, m, ctx, out)
            _let_types(sig, b, {**ctx, x: out[x]}, out)
        case E.Op(op=op, var=x, body=b) if b is not None:
            _let_types(sig, b, {**ctx, x: E.Enum(sig.ops[op][1])}, out)
    return out


def lowers_let_type(sig: E.EffectSignature, before: Term, after: Term) -> bool:
    """Does the step give some let-bound computation a different (smaller) type?"""
    tb, ta = _let_types(sig, before, {}, {}), _let_types(sig, after, {}, {})
    return any(tb[x] != ta[x] for x in tb.keys() & ta.keys())
