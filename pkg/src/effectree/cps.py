"""CPS translation of EPCF into λY, and the harnesses checking that it
simulates effect trees (tree level) and single reduction steps (term level)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from effectree import effects as E
from effectree import lambda_y as L
from effectree.binding import Term, Var, all_names, alpha_key, fresh_name, subst
from effectree.lambda_y import DEFAULT_BUDGET
from effectree.trees import (
    BOTTOM_LEAF,
    UNKNOWN_LEAF,
    TreePrefix,
    agree_up_to_unknown,
    prefix,
)


# ---------------------------------------------------------------------------
# types


def cps_type(t: E.EffType) -> L.LYType:
    match t:
        case E.Base() | E.Never():
            return L.O
        case E.Enum(k=k):
            return L.ground_fn(k)
        case E.Arrow(dom=d, cod=c):
            return L.Arrow(cps_type(d), L.Arrow(L.neg(cps_type(c)), L.O))
    raise TypeError(f"no CPS image for {t}")


def cps_signature(sig: E.EffectSignature, extra: Mapping[str, int] | None = None) -> L.Signature:
    """Value constants at arity 0, each operation at arity k+1."""
    entries = {c: 0 for c in sig.constants()}
    for op, (_, k) in sig.ops.items():
        entries[op] = k + 1
    return L.Signature({**entries, **(extra or {})})


def numeral(n: int, k: int) -> Term:
    """``n̄* = λx0 … x_{k-1}. x_n``."""
    return L.lams([(f"x{i}", L.O) for i in range(k)], Var(f"x{n}"))


# ---------------------------------------------------------------------------
# terms


class CpsTranslator:
    """``V*`` and ``C*``.  Where typing used subsumption (``Never <: T`` and its
    lifting through arrows) the images of the two types differ, so a coercion
    is inserted; on subsumption-free terms the output is the plain translation."""

    def __init__(self, sig: E.EffectSignature, avoid: set[str] | frozenset = frozenset()) -> None:
        self.sig = sig
        self.checker = E.Checker(sig, "epcf")
        self.avoid = set(avoid)
        self.k = self.fresh("c")

    def fresh(self, base: str) -> str:
        name = fresh_name(base, self.avoid)
        self.avoid.add(name)
        return name

    # -- coercions along S <: T
    def coerce(self, m: Term, s: E.EffType, t: E.EffType) -> Term:
        if s == t:
            return m
        if isinstance(s, E.Never):
            return inhabitant(cps_type(t))
        assert isinstance(s, E.Arrow) and isinstance(t, E.Arrow), (s, t)
        a = self.fresh("a")
        body = L.App(m, self.coerce(Var(a), t.dom, s.dom))
        return L.Lam(a, cps_type(t.dom), self.adapt(body, s.cod, t.cod))

    def adapt(self, m: Term, s: E.EffType, t: E.EffType) -> Term:
        """``m : ¬¬S*`` as a term of type ``¬¬T*``."""
        if s == t:
            return m
        k, v = self.k, self.fresh("v")
        inner = L.Lam(v, cps_type(s), L.App(Var(k), self.coerce(Var(v), s, t)))
        return L.Lam(k, L.neg(cps_type(t)), L.App(m, inner))

    def value(self, ctx: dict, v: Term, want: E.EffType | None = None) -> Term:
        got = self.checker.value(ctx, v, None)
        return self.coerce(self._value(ctx, v), got, want or got)

    def _value(self, ctx: dict, v: Term) -> Term:
        match v:
            case Var():
                return v
            case E.Const(name=n):
                return L.Const(n)
            case E.Num(n=n, k=k):
                return numeral(n, k)
            case E.Lam(var=x, ty=ty, body=b):
                return L.Lam(x, cps_type(ty), self.comp({**ctx, x: ty}, b))
            case E.Fix(var=f, ty=ty, body=b):
                return L.Y(L.Lam(f, cps_type(ty), self.value({**ctx, f: ty}, b, ty)))
        raise TypeError(f"no CPS image for value {type(v).__name__}")

    def comp(self, ctx: dict, c: Term, want: E.EffType | None = None) -> Term:
        got = self.checker.comp(ctx, c, None)
        if want is not None and want != got and not isinstance(c, (E.Return, E.Case, E.Let, E.Op)):
            return self.adapt(self.comp(ctx, c), got, want)
        u = want or got
        k = self.k
        kt = L.neg(cps_type(u))
        kv = Var(k)
        match c:
            case E.Return(value=v):
                return L.Lam(k, kt, L.App(kv, self.value(ctx, v, u)))
            case E.App(fun=f, arg=a):
                ft = self.checker.value(ctx, f, None)
                if isinstance(ft, E.Never):
                    ft = E.Arrow(self.checker.value(ctx, a, None), E.Never())
                return L.Lam(k, kt, L.apply(self.value(ctx, f, ft), self.value(ctx, a, ft.dom), kv))
            case E.Let(var=x, comp=m, body=b):
                mt = self.checker.comp(ctx, m, None)
                inner = L.Lam(x, cps_type(mt), L.App(self.comp({**ctx, x: mt}, b, u), kv))
                return L.Lam(k, kt, L.App(self.comp(ctx, m), inner))
            case E.Case(scrut=v, branches=bs):
                scrut = self.value(ctx, v, E.Enum(len(bs)))
                return L.Lam(k, kt, L.apply(scrut, *(L.App(self.comp(ctx, b, u), kv) for b in bs)))
            case E.Op(op=op, param=p, var=x, body=b):
                n = self.sig.arity(op)
                head = L.App(L.Const(op), self.value(ctx, p))
                if b is None:
                    return L.Lam(k, kt, head)
                body = self.comp({**ctx, x: E.Enum(n)}, b, u)
                branches = [L.App(subst(body, x, numeral(i, n)), kv) for i in range(n)]
                return L.Lam(k, kt, L.apply(head, *branches))
        raise TypeError(f"no CPS image for computation {type(c).__name__}")


def inhabitant(t: L.LYType) -> Term:
    """A closed term of type ``t``, used where a coercion out of ``Never`` is
    required but can never be reached."""
    if isinstance(t, L.Arrow):
        return L.Lam("_", t.dom, inhabitant(t.cod))
    return L.Const(E.UNIT_VALUE)


def cps_translate(sig: E.EffectSignature, term: Term, ctx: Mapping[str, E.EffType] | None = None,
                  check: bool = True) -> Term:
    """``V*`` or ``C*``; the result is re-typechecked in λY."""
    ctx = dict(ctx or {})
    tr = CpsTranslator(sig, all_names(term) | set(ctx))
    out = tr.value(ctx, term) if E.is_value(term) else tr.comp(ctx, term)
    if check:
        src_t = E.typecheck(sig, ctx, term, "epcf")
        expected = cps_type(src_t) if E.is_value(term) else L.neg(L.neg(cps_type(src_t)))
        got = L.typecheck_ly(cps_signature(sig), {x: cps_type(t) for x, t in ctx.items()}, out)
        assert got == expected, f"CPS output has type {got}, expected {expected}"
    return out


# ---------------------------------------------------------------------------
# continuations


@dataclass(frozen=True)
class Continuation:
    term: Term
    constants: dict[str, int]


def identity_continuation() -> Continuation:
    return Continuation(L.Lam("x", L.O, Var("x")), {})


def canonical_continuation(t: E.EffType) -> Continuation:
    """Identity on base types, ``λv. v K0 … K_{k-1}`` on ``k``, ``λv. K_fun``
    on functions."""
    match t:
        case E.Base() | E.Never():
            return identity_continuation()
        case E.Enum(k=k):
            consts = {f"K{i}": 0 for i in range(k)}
            return Continuation(L.Lam("v", cps_type(t), L.apply(Var("v"), *(L.Const(n) for n in consts))), consts)
        case E.Arrow():
            return Continuation(L.Lam("v", cps_type(t), L.Const("K_fun")), {"K_fun": 0})
    raise TypeError(f"no canonical continuation for {t}")


# ---------------------------------------------------------------------------
# tree-level simulation


@dataclass(frozen=True)
class SimulationReport:
    equal: bool
    mismatch: tuple[int, ...] | None
    tolerated_unknowns: int
    cps_tree: TreePrefix
    effect_tree: TreePrefix


def substituted_effect_tree(gen: E.EffectTreeGenerator, leaf, depth: int) -> TreePrefix:
    """``prefix(ET(C)[return(V) ← leaf(V, d)], depth)``, where ``leaf``
    produces the prefix substituted for a return leaf at remaining depth ``d``."""
    if depth == 0:
        return UNKNOWN_LEAF
    out = gen.resolve()
    match out:
        case E.NormalReturn(value=v):
            return leaf(v, depth)
        case E.NormalOp(op=op, param=p):
            kids = [prefix(E.ValueLeaf(p), depth - 1)]
            kids += [substituted_effect_tree(g, leaf, depth - 1) for g in gen.branches(out)]
            return TreePrefix(op, tuple(kids))
        case E.Diverged():
            return BOTTOM_LEAF
    return UNKNOWN_LEAF


def simulation_check(sig: E.EffectSignature, comp: Term, continuation: Continuation | None = None,
                     depth: int = 6, budget: int = DEFAULT_BUDGET) -> SimulationReport:
    """Compare ``BT(C* c)`` with ``ET(C)[return(V) ← BT(c V*)]`` up to ``depth``."""
    t = E.typecheck_epcf(sig, {}, comp)
    if continuation is None:
        continuation = canonical_continuation(t)
    lysig = cps_signature(sig, continuation.constants)
    cstar = cps_translate(sig, comp)
    L.typecheck_ly(lysig, {}, continuation.term)
    lhs = prefix(L.BohmGenerator(L.App(cstar, continuation.term), budget), depth)

    def leaf(v: Term, d: int) -> TreePrefix:
        tr = CpsTranslator(sig, all_names(v))
        vstar = tr.value({}, v, t)
        return prefix(L.BohmGenerator(L.App(continuation.term, vstar), budget), d)

    rhs = substituted_effect_tree(E.EffectTreeGenerator(comp, sig, budget), leaf, depth)
    equal, pos, tolerated = agree_up_to_unknown(lhs, rhs)
    return SimulationReport(equal, pos, tolerated, lhs, rhs)


# ---------------------------------------------------------------------------
# step-level simulation


def adm_step(t: Term, k: str) -> list[Term]:
    """All one-step administrative reducts of ``t``, where ``k`` names the
    translation's continuation binder: ``(λk.M) N → M[N/k]`` at the root, and
    parallel reduction of every non-parameter argument of a constant."""
    out: list[Term] = []
    if isinstance(t, L.App) and isinstance(t.fun, L.Lam) and t.fun.var == k:
        out.append(subst(t.fun.body, k, t.arg))
    head, args = L.spine(t)
    if isinstance(head, L.Const) and len(args) >= 2:
        options = [adm_step(a, k) for a in args[1:]]
        if all(options):
            combos: list[list[Term]] = [[]]
            for opts in options:
                combos = [c + [o] for c in combos for o in opts][:64]
            for combo in combos:
                out.append(L.apply(head, args[0], *combo))
    return out


def adm_neighbourhood(t: Term, k: str, radius: int = 2) -> set[int]:
    keys = {alpha_key(t)}
    frontier = [t]
    for _ in range(radius):
        nxt = []
        for s in frontier:
            for r in adm_step(s, k):
                key = alpha_key(r)
                if key not in keys:
                    keys.add(key)
                    nxt.append(r)
        frontier = nxt
    return keys


def _head_adm_path(t: Term, k: str, limit: int) -> list[Term]:
    """``t`` followed by its reducts under root ``(λk.M) N`` steps."""
    path = [t]
    for _ in range(limit):
        if isinstance(t, L.App) and isinstance(t.fun, L.Lam) and t.fun.var == k:
            t = subst(t.fun.body, k, t.arg)
            path.append(t)
        else:
            break
    return path


def _whnf_path(t: Term, limit: int) -> list[Term]:
    path = []
    for _ in range(limit):
        t2 = L.whnf_step(t)
        if t2 is None:
            break
        t = t2
        path.append(t)
    return path


@dataclass(frozen=True)
class StepCheck:
    strict: bool
    relaxed: bool


def check_step_simulation(sig: E.EffectSignature, before: Term, after: Term,
                          forward_limit: int = 400) -> StepCheck:
    """For ``before → after``, search for ``M`` with ``before* κ →⁺ M`` and
    ``after* κ →adm^{≤2} M`` (strict), or ``after* κ →adm* N →adm^{≤2} M`` where
    the leading steps are root continuation β-steps (relaxed)."""
    names = all_names(before) | all_names(after)
    tr = CpsTranslator(sig, names | {"κ"})
    kappa = Var(fresh_name("κ", names))
    t = tr.checker.comp({}, before, None)
    lhs = L.App(tr.comp({}, before), kappa)
    rhs = L.App(tr.comp({}, after, t), kappa)
    targets = {alpha_key(m) for m in _whnf_path(lhs, forward_limit)}
    strict = bool(adm_neighbourhood(rhs, tr.k) & targets)
    relaxed = strict or any(adm_neighbourhood(n, tr.k) & targets
                            for n in _head_adm_path(rhs, tr.k, forward_limit))
    return StepCheck(strict, relaxed)
