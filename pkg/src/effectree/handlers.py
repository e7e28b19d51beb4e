"""Handler calculi and their translations:

* finitary PCF, its reference evaluator, and the encoding of PCF into HEPCF
  (naturals as thunks performing a unary operation ``n`` times);
* the marked-operation encoding of a shallow handler by three deep ones;
* generic (GEPCF) handlers as deep handlers;
* the translation of GEPCF into λY with handler continuations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from effectree import effects as E
from effectree import lambda_y as L
from effectree.binding import Term, Var, all_names, alpha_key, fresh_name, free_vars, subst
from effectree.cps import Continuation, numeral
from effectree.lambda_y import DEFAULT_BUDGET
from effectree.trees import TreePrefix, prefix

SIGMA = "σ"
PCF_SIG = E.EffectSignature({}, {SIGMA: (E.UNIT, 1)})
PCF_ROW = (SIGMA,)


# ---------------------------------------------------------------------------
# zero values


def zero_value(t: E.EffType, sig: E.EffectSignature | None = None) -> Term:
    """A closed, effect-free value of type ``t``."""
    match t:
        case E.Base(name=b):
            if b == E.UNIT:
                return E.Const(E.UNIT_VALUE)
            if sig is None or b not in sig.bases:
                raise ValueError(f"no zero for base type {b} without its constants")
            return E.Const(sig.bases[b][0])
        case E.Enum(k=k):
            return E.Num(0, k)
        case E.Arrow(dom=d, cod=c, row=r):
            return E.Lam("x", d, E.Return(zero_value(c, sig)), r)
    raise ValueError(f"no zero value at type {t}")


# ---------------------------------------------------------------------------
# PCF reference evaluator


@dataclass(frozen=True)
class Numeral:
    n: int
    steps: int


def typecheck_pcf(ctx: Mapping[str, E.EffType], term: Term) -> E.EffType:
    return E.typecheck(PCF_SIG, ctx, term, "pcf")


def _pcf_step(c: Term) -> tuple[Term | None, bool]:
    """(next computation or None when ``c`` is ``return V``, fix unfolded?)"""
    match c:
        case E.Return():
            return None, False
        case E.App(fun=E.Lam(var=x, body=b), arg=a):
            return subst(b, x, a), False
        case E.App(fun=E.Fix() as f, arg=a):
            return E.App(subst(f.body, f.var, f), a), True
        case E.Let(var=x, comp=m, body=b):
            if isinstance(m, E.Return):
                return subst(b, x, m.value), False
            m2, u = _pcf_step(m)
            return E.Let(x, m2, b), u
        case E.CaseNat(scrut=E.Zero(), zero=z):
            return z, False
        case E.CaseNat(scrut=E.Succ(pred=p), var=x, succ=s):
            return subst(s, x, p), False
    raise AssertionError(f"stuck PCF term {type(c).__name__}")


def pcf_eval(term: Term, budget: int = DEFAULT_BUDGET):
    """Call-by-value evaluation of a closed PCF computation of type Nat."""
    seen: dict[int, int] = {}
    c = term
    for n in range(budget + 1):
        nxt, unfolded = _pcf_step(c)
        if nxt is None:
            value = E.nat_value(c.value)
            if value is None:
                raise ValueError("PCF program did not return a numeral")
            return Numeral(value, n)
        if n == budget:
            break
        if unfolded:
            key = alpha_key(c)
            if key in seen:
                return E.Diverged(c, n - seen[key])
            seen[key] = n
        c = nxt
    return E.BudgetExceeded(budget)


# ---------------------------------------------------------------------------
# PCF -> HEPCF


def pcf_type(t: E.EffType) -> E.EffType:
    """``⟦Nat⟧ = Unit →_E Unit``, ``⟦T → U⟧ = ⟦T⟧ →_E ⟦U⟧``."""
    match t:
        case E.NatT():
            return E.Arrow(E.UnitT, E.UnitT, PCF_ROW)
        case E.Arrow(dom=d, cod=c):
            return E.Arrow(pcf_type(d), pcf_type(c), PCF_ROW)
    raise TypeError(f"not a PCF type: {t}")


class _PcfTranslator:
    def __init__(self, avoid: set[str]) -> None:
        self.avoid = set(avoid)
        self.checker = E.Checker(PCF_SIG, "pcf")

    def fresh(self, base: str) -> str:
        name = fresh_name(base, self.avoid)
        self.avoid.add(name)
        return name

    def lam(self, ty: E.EffType, body_fn) -> Term:
        x = self.fresh("x")
        return E.Lam(x, ty, body_fn(Var(x)), PCF_ROW)

    def apply2(self, f: Term, a: Term, b: Term) -> Term:
        """``V W1 W2 ≜ let x = V W1 in x W2``."""
        t = self.fresh("t")
        return E.Let(t, E.App(f, a), E.App(Var(t), b))

    def lam2(self, tf: E.EffType, tg: E.EffType, body_fn) -> Term:
        """``λf,g. C ≜ λf. return(λg. C)``."""
        f, g = self.fresh("f"), self.fresh("g")
        return E.Lam(f, tf, E.Return(E.Lam(g, tg, body_fn(Var(f), Var(g)), PCF_ROW)), PCF_ROW)

    def value(self, ctx: dict, v: Term) -> Term:
        match v:
            case Var():
                return v
            case E.Zero():
                return zero_value(pcf_type(E.Nat))
            case E.Succ(pred=p):
                inner = self.value(ctx, p)
                y = self.fresh("y")
                return self.lam(E.UnitT, lambda _x: E.Op(SIGMA, E.Const(E.UNIT_VALUE), y,
                                                          E.App(inner, E.Const(E.UNIT_VALUE))))
            case E.Lam(var=x, ty=ty, body=b):
                return E.Lam(x, pcf_type(ty), self.comp({**ctx, x: ty}, b), PCF_ROW)
            case E.Fix(var=f, ty=ty, body=b):
                return E.Fix(f, pcf_type(ty), self.value({**ctx, f: ty}, b))
        raise TypeError(f"not a PCF value: {type(v).__name__}")

    def comp(self, ctx: dict, c: Term) -> Term:
        match c:
            case E.Return(value=v):
                return E.Return(self.value(ctx, v))
            case E.App(fun=f, arg=a):
                return E.App(self.value(ctx, f), self.value(ctx, a))
            case E.Let(var=x, comp=m, body=b):
                mt = self.checker.comp(ctx, m, None)
                return E.Let(x, self.comp(ctx, m), self.comp({**ctx, x: mt}, b))
            case E.CaseNat(scrut=v, zero=z, var=n, succ=s):
                t = self.checker.comp(ctx, c, None)
                return self.case(ctx, t, v, z, n, s)
        raise TypeError(f"not a PCF computation: {type(c).__name__}")

    def case(self, ctx, t, v, z, n, s) -> Term:
        unit = E.Const(E.UNIT_VALUE)
        tt = pcf_type(t)
        u2u = E.Arrow(E.UnitT, E.UnitT, PCF_ROW)
        u2t = E.Arrow(E.UnitT, tt, PCF_ROW)
        pty = E.fun(u2u, u2t, tt, row=PCF_ROW)
        result = E.Arrow(pty, tt, PCF_ROW)
        c_tr = self.comp(ctx, z)
        d_tr = self.comp({**ctx, n: E.Nat}, s)
        # return(v) ↦ return(λp. p Z_{Unit→Unit} (λx. ⟦C⟧))
        rv, p = self.fresh("v"), self.fresh("p")
        ret_body = E.Return(E.Lam(p, pty, self.apply2(Var(p), zero_value(u2u), self.lam(E.UnitT, lambda _x: c_tr)),
                                  PCF_ROW))
        # σ(v; r) ↦ let n = return(λx. let y = r 0̄ (λf,g. let z = f () in return(Z_⟦T⟧)) in return(()))
        #           in return(λp. p (λx. σ(z. n ())) (λx. ⟦D⟧))
        sv, r, y, zz, p2, z2 = (self.fresh(b) for b in ("v", "r", "y", "z", "p", "z"))
        drop = self.lam2(u2u, u2t, lambda f, _g: E.Let(zz, E.App(f, unit), E.Return(zero_value(tt))))
        copy = self.lam(E.UnitT, lambda _x: E.Let(y, self.apply2(Var(r), E.Num(0, 1), drop), E.Return(unit)))
        succ_thunk = self.lam(E.UnitT, lambda _x: E.Op(SIGMA, unit, z2, E.App(Var(n), unit)))
        pair = E.Lam(p2, pty, self.apply2(Var(p2), succ_thunk, self.lam(E.UnitT, lambda _x: d_tr)), PCF_ROW)
        op_body = E.Let(n, E.Return(copy), E.Return(pair))
        handler = E.Handler(rv, ret_body, (E.Clause(SIGMA, sv, r, op_body),), "deep", PCF_ROW, result)
        a = self.fresh("a")
        select = self.lam2(u2u, u2t, lambda _f, g: E.App(g, unit))
        return E.Let(a, E.Handle(handler, E.App(self.value(ctx, v), unit)), E.App(Var(a), select))


def translate_pcf_to_hepcf(term: Term, ctx: Mapping[str, E.EffType] | None = None) -> Term:
    """``⟦·⟧`` from PCF into HEPCF over ``E = {σ : Unit ⇝ 1}``; the output is typechecked."""
    ctx = dict(ctx or {})
    src = typecheck_pcf(ctx, term)
    tr = _PcfTranslator(all_names(term) | set(ctx))
    out = tr.value(ctx, term) if E.is_value(term) else tr.comp(ctx, term)
    got = E.typecheck(PCF_SIG, {x: pcf_type(t) for x, t in ctx.items()}, out, "hepcf", PCF_ROW)
    assert E.subtype(got, pcf_type(src)), f"translation has type {got}, expected {pcf_type(src)}"
    return out


def pcf_program(term: Term) -> Term:
    """``C_f = let a = ⟦C⟧ in a ()`` for a closed PCF computation of type Nat."""
    tr = translate_pcf_to_hepcf(term)
    a = fresh_name("a", all_names(tr))
    return E.Let(a, tr, E.App(Var(a), E.Const(E.UNIT_VALUE)))


def count_sigma_spine(t: TreePrefix) -> int | None:
    """``n`` if ``t`` is exactly ``σ((), σ((), … return(()) …))`` with ``n`` σ nodes."""
    n = 0
    while t.label == SIGMA:
        if len(t.children) != 2 or t.children[0].label != E.UNIT_VALUE:
            return None
        t = t.children[1]
        n += 1
    return n if t.label == E.return_label(E.Const(E.UNIT_VALUE)) and not t.children else None


# ---------------------------------------------------------------------------
# shallow handlers as deep handlers


def marked(op: str) -> str:
    return f"{op}_d"


@dataclass(frozen=True)
class ShallowEncoding:
    h_h: E.Handler
    h_r: E.Handler
    h_d: E.Handler
    signature: E.EffectSignature

    def apply(self, comp: Term) -> Term:
        """``handle H_h (handle H_r C)``."""
        return E.Handle(self.h_h, E.Handle(self.h_r, comp))


def encode_shallow_as_deep(handler: E.Handler, sig: E.EffectSignature) -> ShallowEncoding:
    """Three deep handlers whose composition behaves like the shallow ``handler``.

    ``H_d`` marks every operation, ``H_r`` marks all but the root one, and
    ``H_h`` runs the shallow clauses at the root while unmarking the rest.
    The return clause must be the identity: the deep continuation of ``H_h``
    re-enters ``H_h``, so a non-trivial return clause would be applied twice.
    """
    if handler.kind != "shallow" or len(handler.clauses) != 1:
        raise ValueError("expected a shallow handler with a single clause")
    cl = handler.clauses[0]
    base, k = sig.ops[cl.op]
    if (base, k) != (E.UNIT, 1):
        raise ValueError("the encoding handles a single operation of arity Unit ⇝ 1")
    if not (isinstance(handler.ret_body, E.Return) and handler.ret_body.value == Var(handler.ret_var)):
        raise ValueError("the encoding requires an identity return clause")
    op, op_d = cl.op, marked(cl.op)
    sig2 = sig.with_ops({op_d: (base, k)})
    avoid = all_names(handler.ret_body) | all_names(cl.body) | {handler.ret_var}
    x, p, r, y = (fresh_name(b, avoid) for b in ("x", "p", "r", "y"))

    def reraise(name: str, body_fn=lambda v: E.App(Var(r), v)) -> E.Clause:
        return E.Clause(name, p, r, E.Op(name, Var(p), y, body_fn(Var(y))))

    ident = E.Return(Var(x))
    h_d = E.Handler(x, ident, (E.Clause(op, p, r, E.Op(op_d, Var(p), y, E.App(Var(r), Var(y)))),
                               reraise(op_d)), "deep")
    h_r = E.Handler(x, ident, (E.Clause(op, p, r, E.Op(op, Var(p), y, E.Handle(h_d, E.App(Var(r), Var(y))))),),
                    "deep")
    h_h = E.Handler(handler.ret_var, handler.ret_body,
                    (E.Clause(op, cl.var, cl.cont, cl.body),
                     E.Clause(op_d, p, r, E.Op(op, Var(p), y, E.App(Var(r), Var(y))))),
                    "deep", None, handler.result)
    return ShallowEncoding(h_h, h_r, h_d, sig2)


# ---------------------------------------------------------------------------
# generic handlers


def generic_to_deep(term: Term) -> Term:
    """Rewrite every generic clause ``σ(x) ↦ C`` as ``σ(x; r) ↦ let z = C in r z``."""
    match term:
        case E.Handle(handler=h, body=b):
            return E.Handle(_deep_handler(h), generic_to_deep(b), term.loc)
        case E.Handler():
            return _deep_handler(term)
    if isinstance(term, (Var, E.Const, E.Num, E.Zero)):
        return term
    import dataclasses

    updates = {}
    for f in dataclasses.fields(term):
        v = getattr(term, f.name)
        if isinstance(v, Term):
            updates[f.name] = generic_to_deep(v)
        elif isinstance(v, tuple) and v and isinstance(v[0], Term):
            updates[f.name] = tuple(generic_to_deep(x) for x in v)
    return dataclasses.replace(term, **updates)


def _deep_handler(h: E.Handler) -> E.Handler:
    ret_body = generic_to_deep(h.ret_body)
    if h.kind != "generic":
        clauses = tuple(E.Clause(c.op, c.var, c.cont, generic_to_deep(c.body)) for c in h.clauses)
        return E.Handler(h.ret_var, ret_body, clauses, h.kind, h.row, h.result)
    clauses = []
    for c in h.clauses:
        body = generic_to_deep(c.body)
        avoid = all_names(body) | {c.var}
        r, z = fresh_name("r", avoid), fresh_name("z", avoid)
        clauses.append(E.Clause(c.op, c.var, r, E.Let(z, body, E.App(Var(r), Var(z)))))
    return E.Handler(h.ret_var, ret_body, tuple(clauses), "deep", h.row, h.result)


# ---------------------------------------------------------------------------
# GEPCF -> λY


def gepcf_type(t: E.EffType, sig: E.EffectSignature) -> L.LYType:
    """``⟦B⟧ = o``, ``⟦k⟧ = o^k → o``, ``⟦T →_E U⟧ = ⟦T⟧ → ⟦E⟧ → ¬⟦U⟧ → o``."""
    match t:
        case E.Base() | E.Never():
            return L.O
        case E.Enum(k=k):
            return L.ground_fn(k)
        case E.Arrow(dom=d, cod=c, row=r):
            return L.Arrow(gepcf_type(d, sig), comp_type(r, c, sig))
    raise TypeError(f"no λY image for {t}")


def handler_type(op: str, sig: E.EffectSignature) -> L.LYType:
    """Type of one handler continuation: ``o → ¬⟦k⟧ → o``."""
    return L.arrows(L.O, L.neg(L.ground_fn(sig.arity(op))), L.O)


def comp_type(row, t: E.EffType, sig: E.EffectSignature) -> L.LYType:
    """``⟦E⟧ → ¬¬⟦T⟧`` with ``⟦E⟧`` curried in canonical row order."""
    return L.arrows(*(handler_type(op, sig) for op in row), L.neg(L.neg(gepcf_type(t, sig))))


def gepcf_signature(sig: E.EffectSignature, extra: Mapping[str, int] | None = None) -> L.Signature:
    entries = {c: 0 for c in sig.constants()}
    for op, (_, k) in sig.ops.items():
        entries[op] = k + 1
    return L.Signature({**entries, **(extra or {})})


def inhabitant(t: L.LYType) -> Term:
    if isinstance(t, L.Arrow):
        return L.Lam("_", t.dom, inhabitant(t.cod))
    return L.Const(E.UNIT_VALUE)


class _GepcfTranslator:
    def __init__(self, sig: E.EffectSignature, avoid: set[str]) -> None:
        self.sig = sig
        self.avoid = set(avoid)
        self.checker = E.Checker(sig, "gepcf")
        self.k = self.fresh("c")
        self.h = {op: self.fresh(f"h_{op}") for op in sig.ops}

    def fresh(self, base: str) -> str:
        name = fresh_name(base, self.avoid)
        self.avoid.add(name)
        return name

    def ty(self, t: E.EffType) -> L.LYType:
        return gepcf_type(t, self.sig)

    def wrap(self, row, t: E.EffType, body_fn) -> Term:
        """``λ(h⃗, c). body`` at row ``row`` and result type ``t``."""
        hs = [(self.h[op], handler_type(op, self.sig)) for op in row]
        kv = (self.k, L.neg(self.ty(t)))
        return L.lams(hs + [kv], body_fn([Var(self.h[op]) for op in row], Var(self.k)))

    # -- coercions along subtyping
    def coerce(self, m: Term, s: E.EffType, t: E.EffType) -> Term:
        if s == t:
            return m
        if isinstance(s, E.Never):
            return inhabitant(self.ty(t))
        assert isinstance(s, E.Arrow) and isinstance(t, E.Arrow), (s, t)
        a = self.fresh("a")
        inner = self.adapt(L.App(m, self.coerce(Var(a), t.dom, s.dom)), s.row, s.cod, t.row, t.cod)
        return L.Lam(a, self.ty(t.dom), inner)

    def adapt(self, m: Term, row_s, s: E.EffType, row_t, t: E.EffType) -> Term:
        """Turn ``m : ⟦row_s⟧ → ¬¬⟦s⟧`` into a term of type ``⟦row_t⟧ → ¬¬⟦t⟧``."""
        if tuple(row_s) == tuple(row_t) and s == t:
            return m

        def body(hs, k):
            chosen = [hs[list(row_t).index(op)] for op in row_s]
            if s == t:
                return L.apply(m, *chosen, k)
            v = self.fresh("v")
            return L.apply(m, *chosen, L.Lam(v, self.ty(s), L.App(k, self.coerce(Var(v), s, t))))

        return self.wrap(row_t, t, body)

    # -- values
    def value(self, ctx: dict, v: Term, row) -> Term:
        match v:
            case Var():
                return v
            case E.Const(name=n):
                return L.Const(n)
            case E.Num(n=n, k=k):
                return numeral(n, k)
            case E.Lam(var=x, ty=ty, body=b, row=r):
                dom = self.checker.resolve(ty, row)
                inner = self.sig.row(r) if r is not None else row
                return L.Lam(x, self.ty(dom), self.comp({**ctx, x: dom}, b, inner))
            case E.Fix(var=f, ty=ty, body=b):
                t = self.checker.resolve(ty, row)
                bt = self.checker.value({**ctx, f: t}, b, row)
                return L.Y(L.Lam(f, self.ty(t), self.coerce(self.value({**ctx, f: t}, b, row), bt, t)))
        raise TypeError(f"no λY image for value {type(v).__name__}")

    # -- computations, always translated at the ambient row
    def comp(self, ctx: dict, c: Term, row) -> Term:
        t = self.checker.comp(ctx, c, row)
        match c:
            case E.Return(value=v):
                return self.wrap(row, t, lambda hs, k: L.App(k, self.value(ctx, v, row)))
            case E.App(fun=f, arg=a):
                ft0 = self.checker.value(ctx, f, row)
                at = self.checker.value(ctx, a, row)
                ft = E.Arrow(at, E.Never(), tuple(row)) if isinstance(ft0, E.Never) else ft0
                fv = self.coerce(self.value(ctx, f, row), ft0, ft)
                head = L.App(fv, self.coerce(self.value(ctx, a, row), at, ft.dom))
                return self.adapt(head, ft.row, ft.cod, row, t)
            case E.Let(var=x, comp=m, body=b):
                mt = self.checker.comp(ctx, m, row)
                mm, bb = self.comp(ctx, m, row), self.comp({**ctx, x: mt}, b, row)
                return self.wrap(row, t, lambda hs, k: L.apply(mm, *hs, L.Lam(x, self.ty(mt), L.apply(bb, *hs, k))))
            case E.Op(op=op, param=p, var=x, body=b):
                n = self.sig.arity(op)
                pv = self.value(ctx, p, row)
                if b is None:
                    cont = L.Lam(self.fresh("x"), L.O, L.Const(E.UNIT_VALUE))
                    return self.wrap(row, t, lambda hs, k: L.apply(hs[row.index(op)], pv, cont))
                bb = self.comp({**ctx, x: E.Enum(n)}, b, row)
                return self.wrap(row, t, lambda hs, k: L.apply(
                    hs[row.index(op)], pv, L.Lam(x, L.ground_fn(n), L.apply(bb, *hs, k))))
            case E.Case(scrut=v, branches=bs):
                branches = [self.branch(ctx, b, row, t) for b in bs]
                vv = self.coerce(self.value(ctx, v, row), self.checker.value(ctx, v, row), E.Enum(len(bs)))
                return self.wrap(row, t, lambda hs, k: L.apply(vv, *(L.apply(b, *hs, k) for b in branches)))
            case E.Handle(handler=h, body=body):
                return self.handle(ctx, h, body, row, t)
        raise TypeError(f"no λY image for computation {type(c).__name__}")

    def branch(self, ctx, c: Term, row, t: E.EffType) -> Term:
        bt = self.checker.comp(ctx, c, row)
        return self.adapt(self.comp(ctx, c, row), row, bt, row, t)

    def handle(self, ctx, h: E.Handler, body: Term, row, t: E.EffType) -> Term:
        if h.kind != "generic":
            raise TypeError("only generic handlers translate to λY")
        inner = self.sig.row(h.row) if h.row is not None else self.sig.row(h.handled)
        u = self.checker.comp(ctx, body, inner)
        cc = self.comp(ctx, body, inner)
        ret = self.branch({**ctx, h.ret_var: u}, h.ret_body, row, t)
        clauses = {}
        for cl in h.clauses:
            base, n = self.sig.ops[cl.op]
            clauses[cl.op] = (cl.var, self.branch({**ctx, cl.var: E.Base(base)}, cl.body, row, E.Enum(n)), n)

        def body_fn(hs, k):
            args = []
            for op in inner:
                x, ci, n = clauses[op]
                r = self.fresh("r")
                args.append(L.lams([(x, L.O), (r, L.neg(L.ground_fn(n)))], L.apply(ci, *hs, Var(r))))
            args.append(L.Lam(h.ret_var, self.ty(u), L.apply(ret, *hs, k)))
            return L.apply(cc, *args)

        return self.wrap(row, t, body_fn)


def translate_gepcf_to_lambday(sig: E.EffectSignature, term: Term, row=None,
                               ctx: Mapping[str, E.EffType] | None = None) -> Term:
    """``⟦C⟧ : ⟦E⟧ → ¬¬⟦T⟧`` (or ``⟦V⟧ : ⟦T⟧``); the output is re-typechecked."""
    ctx = dict(ctx or {})
    row = sig.row(row) if row is not None else sig.full_row
    checker = E.Checker(sig, "gepcf")
    ctx = {x: checker.resolve(t, row) for x, t in ctx.items()}
    t = checker.check(ctx, term, row)
    tr = _GepcfTranslator(sig, all_names(term) | set(ctx))
    if E.is_value(term):
        out, expected = tr.value(ctx, term, row), gepcf_type(t, sig)
    else:
        out, expected = tr.comp(ctx, term, row), comp_type(row, t, sig)
    got = L.typecheck_ly(gepcf_signature(sig), {x: gepcf_type(v, sig) for x, v in ctx.items()}, out)
    assert got == expected, f"translation has type {got}, expected {expected}"
    return out


def identity_handler(sig: E.EffectSignature, row=None) -> list[Term]:
    """``(h_E)_i = λ(x, f). σ_i x (f ⟦0̄⟧) ⋯ (f ⟦k-1̄⟧)``."""
    row = sig.row(row) if row is not None else sig.full_row
    out = []
    for op in row:
        k = sig.arity(op)
        body = L.apply(L.App(L.Const(op), Var("x")), *(L.App(Var("f"), numeral(i, k)) for i in range(k)))
        out.append(L.lams([("x", L.O), ("f", L.neg(L.ground_fn(k)))], body))
    return out


def gepcf_continuation(t: E.EffType, sig: E.EffectSignature) -> Continuation:
    """Canonical continuation at ``⟦T⟧ → o``."""
    match t:
        case E.Base() | E.Never():
            return Continuation(L.Lam("x", L.O, Var("x")), {})
        case E.Enum(k=k):
            consts = {f"K{i}": 0 for i in range(k)}
            return Continuation(L.Lam("v", L.ground_fn(k), L.apply(Var("v"), *(L.Const(n) for n in consts))), consts)
        case E.Arrow():
            return Continuation(L.Lam("v", gepcf_type(t, sig), L.Const("K_fun")), {"K_fun": 0})
    raise TypeError(f"no canonical continuation for {t}")


@dataclass(frozen=True)
class GepcfReport:
    equal: bool
    mismatch: tuple[int, ...] | None
    lambda_y_tree: TreePrefix
    effect_tree: TreePrefix


def gepcf_simulation_check(sig: E.EffectSignature, comp: Term, row=None, depth: int = 5,
                           budget: int = DEFAULT_BUDGET) -> GepcfReport:
    """``ET(C)[return(V) ← BT(c ⟦V⟧)]`` against ``BT(⟦C⟧ h⃗_E c)`` up to ``depth``."""
    from effectree.cps import substituted_effect_tree
    from effectree.trees import agree_up_to_unknown

    row = sig.row(row) if row is not None else sig.full_row
    t = E.typecheck(sig, {}, comp, "gepcf", row)
    cont = gepcf_continuation(t, sig)
    lysig = gepcf_signature(sig, cont.constants)
    translated = translate_gepcf_to_lambday(sig, comp, row)
    term = L.apply(translated, *identity_handler(sig, row), cont.term)
    L.typecheck_ly(lysig, {}, term)
    lhs = prefix(L.BohmGenerator(term, budget), depth)

    def leaf(v: Term, d: int) -> TreePrefix:
        vt = translate_gepcf_to_lambday(sig, v, row)
        return prefix(L.BohmGenerator(L.App(cont.term, vt), budget), d)

    elaborated = E.elaborate(sig, comp, row)
    rhs = substituted_effect_tree(E.EffectTreeGenerator(elaborated, sig, budget), leaf, depth)
    equal, pos, _ = agree_up_to_unknown(lhs, rhs)
    return GepcfReport(equal, pos, lhs, rhs)


def closed(term: Term) -> bool:
    return not free_vars(term)
