"""The λY-calculus: simple types over a first-order signature, weak head
reduction and one-step Böhm tree unfolding for closed ground terms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from effectree.binding import Term, Var, alpha_key, free_vars, subst
from effectree.errors import TypeCheckError, UnboundVariable, UnknownConstant

DEFAULT_BUDGET = 10_000

BOTTOM = "⊥"
UNKNOWN = "?"


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class LYType:
    pass


@dataclass(frozen=True)
class Ground(LYType):
    def __str__(self) -> str:
        return "o"


@dataclass(frozen=True)
class Arrow(LYType):
    dom: LYType
    cod: LYType

    def __str__(self) -> str:
        return f"(-> {self.dom} {self.cod})"


O = Ground()


def arrows(*types: LYType) -> LYType:
    """Right-nested arrow ``t1 -> t2 -> ... -> tn``."""
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


def ground_fn(arity: int) -> LYType:
    """``o^arity -> o``."""
    return arrows(*([O] * arity), O)


def neg(t: LYType) -> LYType:
    return Arrow(t, O)


def type_order(t: LYType) -> int:
    if isinstance(t, Arrow):
        return max(type_order(t.dom) + 1, type_order(t.cod))
    return 0


@dataclass(frozen=True)
class Signature:
    """Constant name -> arity."""

    entries: Mapping[str, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", dict(self.entries))
        for name, ar in self.entries.items():
            if ar < 0:
                raise ValueError(f"negative arity for {name}")

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def arity(self, name: str) -> int:
        return self.entries[name]

    def extend(self, more: Mapping[str, int]) -> "Signature":
        merged = dict(self.entries)
        for k, v in more.items():
            if k in merged and merged[k] != v:
                raise ValueError(f"constant {k} redeclared with arity {v}")
            merged[k] = v
        return Signature(merged)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.entries.items())))


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Lam(Term):
    var: str
    ty: LYType | None
    body: Term
    loc: Any = field(default=None, compare=False, repr=False)
    binders = {"var": ("body",)}


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term
    loc: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Y(Term):
    body: Term
    loc: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Const(Term):
    name: str
    loc: Any = field(default=None, compare=False, repr=False)


def apply(head: Term, *args: Term) -> Term:
    for a in args:
        head = App(head, a)
    return head


def lams(params: list[tuple[str, LYType]], body: Term) -> Term:
    for name, ty in reversed(params):
        body = Lam(name, ty, body)
    return body


def spine(t: Term) -> tuple[Term, list[Term]]:
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


# ---------------------------------------------------------------------------
# typing


def typecheck_ly(signature: Signature, context: Mapping[str, LYType], term: Term) -> LYType:
    """Type of ``term`` under the standard λY rules; binders must be annotated."""
    ctx = dict(context)
    return _infer(signature, ctx, term)


def _infer(sig: Signature, ctx: dict[str, LYType], t: Term) -> LYType:
    match t:
        case Var(name=name):
            if name not in ctx:
                raise UnboundVariable(f"unbound variable {name}", "var", t)
            return ctx[name]
        case Const(name=name):
            if name not in sig:
                raise UnknownConstant(f"unknown constant {name}", "const", t)
            return ground_fn(sig.arity(name))
        case Lam(var=x, ty=ty, body=body):
            if ty is None:
                raise TypeCheckError(f"binder {x} has no type annotation", "lam", t)
            saved = ctx.get(x)
            ctx[x] = ty
            try:
                cod = _infer(sig, ctx, body)
            finally:
                if saved is None:
                    del ctx[x]
                else:
                    ctx[x] = saved
            return Arrow(ty, cod)
        case App(fun=f, arg=a):
            ft = _infer(sig, ctx, f)
            if not isinstance(ft, Arrow):
                raise TypeCheckError(f"applying a term of type {ft}", "app", t)
            at = _infer(sig, ctx, a)
            if at != ft.dom:
                raise TypeCheckError(f"argument has type {at}, expected {ft.dom}", "app", t)
            return ft.cod
        case Y(body=body):
            bt = _infer(sig, ctx, body)
            if not isinstance(bt, Arrow) or bt.dom != bt.cod:
                raise TypeCheckError(f"Y applied to a term of type {bt}", "Y", t)
            return bt.dom
    raise TypeCheckError(f"not a λY term: {type(t).__name__}", None, None)


# ---------------------------------------------------------------------------
# weak head reduction


@dataclass(frozen=True)
class LamHead:
    term: Term


@dataclass(frozen=True)
class ConstHead:
    name: str
    args: tuple[Term, ...]


Whnf = LamHead | ConstHead


@dataclass(frozen=True)
class Normal:
    whnf: Whnf
    steps: int


@dataclass(frozen=True)
class Diverged:
    witness: Term
    cycle_length: int
    steps: int


@dataclass(frozen=True)
class BudgetExceeded:
    budget: int


ReduceOutcome = Normal | Diverged | BudgetExceeded


def whnf_step(t: Term) -> Term | None:
    """One weak head step, or None when ``t`` is already in WHNF."""
    head, args = spine(t)
    if isinstance(head, Y):
        return apply(App(head.body, head), *args)
    if isinstance(head, Lam) and args:
        return apply(subst(head.body, head.var, args[0]), *args[1:])
    return None


def whnf_reduce(term: Term, budget: int = DEFAULT_BUDGET) -> ReduceOutcome:
    """Weak head normalise ``term``.

    Any infinite reduction of a typed term unfolds Y infinitely often, so
    revisits are looked for only at Y-headed terms.
    """
    seen: dict[int, int] = {}
    steps = 0
    t = term
    while True:
        head, args = spine(t)
        if isinstance(head, Const):
            return Normal(ConstHead(head.name, tuple(args)), steps)
        if isinstance(head, Var):
            raise ValueError(f"weak head reduction of an open term (free {head.name})")
        if isinstance(head, Lam) and not args:
            return Normal(LamHead(t), steps)
        if steps >= budget:
            return BudgetExceeded(budget)
        if isinstance(head, Y):
            k = alpha_key(t)
            if k in seen:
                return Diverged(t, steps - seen[k], steps)
            seen[k] = steps
            t = apply(App(head.body, head), *args)
        else:
            t = apply(subst(head.body, head.var, args[0]), *args[1:])
        steps += 1


# ---------------------------------------------------------------------------
# Böhm tree unfolding


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class BottomUnknown:
    pass


@dataclass(frozen=True)
class Node:
    name: str
    children: tuple[Term, ...]


def bohm_node(term: Term, budget: int = DEFAULT_BUDGET) -> Bottom | BottomUnknown | Node:
    if free_vars(term):
        raise ValueError("Böhm tree of an open term")
    out = whnf_reduce(term, budget)
    match out:
        case Diverged():
            return Bottom()
        case BudgetExceeded():
            return BottomUnknown()
        case Normal(whnf=ConstHead(name=name, args=args)):
            return Node(name, args)
    raise ValueError("Böhm tree of a term that is not of ground type")


class BohmGenerator:
    """Lazy ``BT(term)``; configurations are alpha-canonical closed terms."""

    __slots__ = ("term", "budget")

    def __init__(self, term: Term, budget: int = DEFAULT_BUDGET) -> None:
        self.term = term
        self.budget = budget

    def expand(self):
        node = bohm_node(self.term, self.budget)
        match node:
            case Bottom():
                return BOTTOM, ()
            case BottomUnknown():
                return UNKNOWN, ()
        return node.name, tuple(BohmGenerator(c, self.budget) for c in node.children)

    def key(self) -> int:
        return alpha_key(self.term)
