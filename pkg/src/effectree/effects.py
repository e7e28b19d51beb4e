"""Fine-grained call-by-value calculi with algebraic operations.

One syntax serves EPCF, HEPCF (deep and shallow handlers), GEPCF (generic
handlers) and finitary PCF; the ``mode`` of the type checker decides which
constructs are admitted and whether effect rows are tracked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from effectree.binding import Term, Var, alpha_key, free_vars, subst
from effectree.errors import (
    ArityMismatch,
    EffectEscape,
    TypeCheckError,
    UnboundVariable,
    UnhandledOperation,
    UnknownConstant,
    UnknownOperation,
)
from effectree.lambda_y import BOTTOM, DEFAULT_BUDGET, UNKNOWN

MODES = ("epcf", "hepcf", "gepcf", "pcf")
UNIT = "Unit"
UNIT_VALUE = "()"


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class EffType:
    def __str__(self) -> str:
        from effectree import syntax

        return syntax.show_type(self)


@dataclass(frozen=True)
class Base(EffType):
    name: str


@dataclass(frozen=True)
class Enum(EffType):
    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("Enum(k) requires k >= 1")


@dataclass(frozen=True)
class NatT(EffType):
    pass


@dataclass(frozen=True)
class Never(EffType):
    """Type of computations that cannot return (arity-0 operations)."""


@dataclass(frozen=True)
class Arrow(EffType):
    dom: EffType
    cod: EffType
    row: tuple[str, ...] | None = None


UnitT = Base(UNIT)
Nat = NatT()


def fun(*types: EffType, row: tuple[str, ...] | None = None) -> EffType:
    """Right-nested arrow, every arrow carrying ``row``."""
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result, row)
    return result


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class EffectSignature:
    """Finite base types with their constants, and operations ``σ : B ⇝ k``
    in declaration order (the canonical row order)."""

    bases: Mapping[str, tuple[str, ...]]
    ops: Mapping[str, tuple[str, int]]

    def __post_init__(self) -> None:
        bases = {UNIT: (UNIT_VALUE,)}
        bases.update({k: tuple(v) for k, v in self.bases.items()})
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "ops", dict(self.ops))
        owner: dict[str, str] = {}
        for b, consts in bases.items():
            if not consts:
                raise ValueError(f"base type {b} has no constants")
            for c in consts:
                if c in owner:
                    raise ValueError(f"constant {c} belongs to both {owner[c]} and {b}")
                owner[c] = b
        for op, (b, k) in self.ops.items():
            if b not in bases:
                raise ValueError(f"operation {op} uses undeclared base type {b}")
            if k < 0:
                raise ValueError(f"operation {op} has negative arity")
        object.__setattr__(self, "_owner", owner)
        object.__setattr__(self, "_order", {op: i for i, op in enumerate(self.ops)})

    def __hash__(self) -> int:
        return hash((tuple(self.bases.items()), tuple(self.ops.items())))

    def base_of(self, const: str) -> str | None:
        return self._owner.get(const)

    def arity(self, op: str) -> int:
        return self.ops[op][1]

    def param_base(self, op: str) -> str:
        return self.ops[op][0]

    def row(self, names: Iterable[str]) -> tuple[str, ...]:
        names = list(names)
        for n in names:
            if n not in self.ops:
                raise UnknownOperation(f"unknown operation {n}", "row")
        if len(set(names)) != len(names):
            raise TypeCheckError(f"duplicate operation in row {names}", "row")
        return tuple(sorted(names, key=self._order.__getitem__))

    @property
    def full_row(self) -> tuple[str, ...]:
        return tuple(self.ops)

    def with_ops(self, more: Mapping[str, tuple[str, int]]) -> "EffectSignature":
        ops = dict(self.ops)
        for k, v in more.items():
            if k in ops and ops[k] != v:
                raise ValueError(f"operation {k} redeclared")
            ops[k] = v
        bases = {k: v for k, v in self.bases.items() if k != UNIT}
        return EffectSignature(bases, ops)

    def constants(self) -> tuple[str, ...]:
        return tuple(c for cs in self.bases.values() for c in cs)


# ---------------------------------------------------------------------------
# values


@dataclass(frozen=True)
class Const(Term):
    name: str
    loc: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Num(Term):
    n: int
    k: int
    loc: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Lam(Term):
    var: str
    ty: EffType | None
    body: Term
    row: tuple[str, ...] | None = None
    loc: Any = field(default=None, compare=False, repr=False)
    binders = {"var": ("body",)}


@dataclass(frozen=True)
class Fix(Term):
    var: str
    ty: EffType | None
    body: Term
    loc: Any = field(default=None, compare=False, repr=False)
    binders = {"var": ("body",)}


@dataclass(frozen=True)
class Zero(Term):
    loc: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Succ(Term):
    pred: Term
    loc: Any = field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------------------
# computations


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term
    loc: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Return(Term):
    value: Term
    loc: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Let(Term):
    var: str
    comp: Term
    body: Term
    loc: Any = field(default=None, compare=False, repr=False)
    binders = {"var": ("body",)}


@dataclass(frozen=True)
class Op(Term):
    """``σ(V; x.C)``; ``body`` is None exactly for arity-0 operations."""

    op: str
    param: Term
    var: str
    body: Term | None
    loc: Any = field(default=None, compare=False, repr=False)
    binders = {"var": ("body",)}


@dataclass(frozen=True)
class Case(Term):
    scrut: Term
    branches: tuple[Term, ...]
    loc: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class CaseNat(Term):
    scrut: Term
    zero: Term
    var: str
    succ: Term
    loc: Any = field(default=None, compare=False, repr=False)
    binders = {"var": ("succ",)}


@dataclass(frozen=True)
class Clause(Term):
    """``σ(x; r) ↦ C``; ``cont`` is None for generic clauses."""

    op: str
    var: str
    cont: str | None
    body: Term
    loc: Any = field(default=None, compare=False, repr=False)
    binders = {"var": ("body",), "cont": ("body",)}


HANDLER_KINDS = ("deep", "shallow", "generic")


@dataclass(frozen=True)
class Handler(Term):
    ret_var: str
    ret_body: Term
    clauses: tuple[Clause, ...]
    kind: str = "deep"
    row: tuple[str, ...] | None = None
    result: EffType | None = None
    loc: Any = field(default=None, compare=False, repr=False)
    binders = {"ret_var": ("ret_body",)}

    def __post_init__(self) -> None:
        if self.kind not in HANDLER_KINDS:
            raise ValueError(f"unknown handler kind {self.kind}")

    def clause(self, op: str) -> Clause | None:
        for c in self.clauses:
            if c.op == op:
                return c
        return None

    @property
    def handled(self) -> tuple[str, ...]:
        return tuple(c.op for c in self.clauses)


@dataclass(frozen=True)
class Handle(Term):
    handler: Handler
    body: Term
    loc: Any = field(default=None, compare=False, repr=False)


VALUE_CLASSES = (Var, Const, Num, Lam, Fix, Zero, Succ)
COMP_CLASSES = (App, Return, Let, Op, Case, CaseNat, Handle)


def is_value(t: Term) -> bool:
    return isinstance(t, VALUE_CLASSES)


def nat(n: int) -> Term:
    v: Term = Zero()
    for _ in range(n):
        v = Succ(v)
    return v


def nat_value(v: Term) -> int | None:
    n = 0
    while isinstance(v, Succ):
        v, n = v.pred, n + 1
    return n if isinstance(v, Zero) else None


# ---------------------------------------------------------------------------
# typing


def subtype(a: EffType, b: EffType) -> bool:
    if a == b or isinstance(a, Never):
        return True
    if isinstance(a, Arrow) and isinstance(b, Arrow):
        if a.row is not None and b.row is not None and not set(a.row) <= set(b.row):
            return False
        if (a.row is None) != (b.row is None):
            return False
        return subtype(b.dom, a.dom) and subtype(a.cod, b.cod)
    return False


def join(a: EffType, b: EffType, term: Term | None = None) -> EffType:
    if subtype(a, b):
        return b
    if subtype(b, a):
        return a
    raise TypeCheckError(f"branches have incompatible types {a} and {b}", "case", term)


class Checker:
    def __init__(self, sig: EffectSignature, mode: str = "epcf") -> None:
        if mode not in MODES:
            raise ValueError(f"unknown calculus {mode}")
        self.sig = sig
        self.mode = mode
        self.rows = mode in ("hepcf", "gepcf")

    # -- helpers
    def _row(self, row: Iterable[str] | None) -> tuple[str, ...] | None:
        if not self.rows:
            return None
        return self.sig.row(row) if row is not None else self.sig.full_row

    def check_type(self, t: EffType, term: Term | None = None) -> None:
        match t:
            case Base(name=b):
                if b not in self.sig.bases:
                    raise TypeCheckError(f"unknown base type {b}", "type", term)
            case Arrow(dom=d, cod=c, row=r):
                self.check_type(d, term)
                self.check_type(c, term)
                if r is not None:
                    self.sig.row(r)

    def _annot(self, t: EffType | None, term: Term, row) -> EffType:
        if t is None:
            raise TypeCheckError("binder has no type annotation", "annotation", term)
        self.check_type(t, term)
        if self.rows:
            t = self.resolve(t, row)
        return t

    def resolve(self, t: EffType, row: tuple[str, ...]) -> EffType:
        """Fill missing arrow rows with ``row``."""
        if isinstance(t, Arrow):
            return Arrow(self.resolve(t.dom, row), self.resolve(t.cod, row),
                         self.sig.row(t.row) if t.row is not None else row)
        return t

    # -- values
    def value(self, ctx: Mapping[str, EffType], v: Term, row) -> EffType:
        match v:
            case Var(name=x):
                if x not in ctx:
                    raise UnboundVariable(f"unbound variable {x}", "var", v)
                return ctx[x]
            case Const(name=c):
                b = self.sig.base_of(c)
                if b is None:
                    raise UnknownConstant(f"unknown constant {c}", "const", v)
                return Base(b)
            case Num(n=n, k=k):
                if not 0 <= n < k:
                    raise TypeCheckError(f"numeral {n} out of range for {k}", "num", v)
                return Enum(k)
            case Lam(var=x, ty=ty, body=body, row=r):
                dom = self._annot(ty, v, row)
                inner = self._row(r) if r is not None else row
                cod = self.comp({**ctx, x: dom}, body, inner)
                return Arrow(dom, cod, inner)
            case Fix(var=f, ty=ty, body=body):
                t = self._annot(ty, v, row)
                if not isinstance(t, Arrow):
                    raise TypeCheckError(f"fix at non-arrow type {t}", "fix", v)
                bt = self.value({**ctx, f: t}, body, row)
                if not subtype(bt, t):
                    raise TypeCheckError(f"fix body has type {bt}, expected {t}", "fix", v)
                return t
            case Zero():
                return Nat
            case Succ(pred=p):
                pt = self.value(ctx, p, row)
                if pt != Nat:
                    raise TypeCheckError(f"succ of {pt}", "succ", v)
                return Nat
        raise TypeCheckError(f"expected a value, got {type(v).__name__}", "value", v)

    # -- computations
    def comp(self, ctx: Mapping[str, EffType], c: Term, row) -> EffType:
        match c:
            case Return(value=v):
                return self.value(ctx, v, row)
            case App(fun=f, arg=a):
                ft = self.value(ctx, f, row)
                if isinstance(ft, Never):
                    # unreachable: Never <: at → Never
                    self.value(ctx, a, row)
                    return Never()
                if not isinstance(ft, Arrow):
                    raise TypeCheckError(f"applying a value of type {ft}", "app", c)
                at = self.value(ctx, a, row)
                if not subtype(at, ft.dom):
                    raise TypeCheckError(f"argument has type {at}, expected {ft.dom}", "app", c)
                if self.rows and not set(ft.row) <= set(row):
                    extra = sorted(set(ft.row) - set(row))
                    raise EffectEscape(f"operations {extra} escape the row {list(row)}", "app", c)
                return ft.cod
            case Let(var=x, comp=m, body=b):
                mt = self.comp(ctx, m, row)
                return self.comp({**ctx, x: mt}, b, row)
            case Op(op=op, param=p, var=x, body=b):
                if self.mode == "pcf":
                    raise TypeCheckError("operations are not part of PCF", "op", c)
                if op not in self.sig.ops:
                    raise UnknownOperation(f"unknown operation {op}", "op", c)
                if self.rows and op not in row:
                    raise EffectEscape(f"operation {op} is not in the row {list(row)}", "op", c)
                base, k = self.sig.ops[op]
                pt = self.value(ctx, p, row)
                if pt != Base(base):
                    raise TypeCheckError(f"parameter of {op} has type {pt}, expected {base}", "op", c)
                if k == 0:
                    if b is not None:
                        raise ArityMismatch(f"{op} has arity 0 but a continuation was given", "op", c)
                    return Never()
                if b is None:
                    raise ArityMismatch(f"{op} has arity {k} but no continuation was given", "op", c)
                return self.comp({**ctx, x: Enum(k)}, b, row)
            case Case(scrut=v, branches=bs):
                vt = self.value(ctx, v, row)
                if isinstance(vt, Never):  # unreachable; any number of branches
                    vt = Enum(len(bs))
                if not isinstance(vt, Enum):
                    raise TypeCheckError(f"case on a value of type {vt}", "case", c)
                if vt.k != len(bs):
                    raise ArityMismatch(f"case on {vt.k} has {len(bs)} branches", "case", c)
                result: EffType = Never()
                for b in bs:
                    result = join(result, self.comp(ctx, b, row), c)
                return result
            case CaseNat(scrut=v, zero=z, var=x, succ=s):
                vt = self.value(ctx, v, row)
                if vt != Nat:
                    raise TypeCheckError(f"case on a value of type {vt}", "case-nat", c)
                return join(self.comp(ctx, z, row), self.comp({**ctx, x: Nat}, s, row), c)
            case Handle(handler=h, body=body):
                return self.handle(ctx, h, body, row, c)
        raise TypeCheckError(f"expected a computation, got {type(c).__name__}", "comp", c)

    def handle(self, ctx, h: Handler, body: Term, row, c: Term) -> EffType:
        if self.mode in ("epcf", "pcf"):
            raise TypeCheckError("handlers are not part of this calculus", "handle", c)
        if self.mode == "gepcf" and h.kind != "generic":
            raise TypeCheckError("GEPCF admits only generic handlers", "handle", c)
        if self.mode == "hepcf" and h.kind == "generic":
            raise TypeCheckError("generic handlers belong to GEPCF", "handle", c)
        for cl in h.clauses:
            if cl.op not in self.sig.ops:
                raise UnknownOperation(f"unknown operation {cl.op}", "handler", c)
        handled = self.sig.row(h.handled)
        inner = self.sig.row(h.row) if h.row is not None else handled
        if set(inner) != set(handled):
            missing = sorted(set(inner) - set(handled))
            raise UnhandledOperation(f"operations {missing} have no clause", "handler", c)
        u = self.comp(ctx, body, inner)
        t = self.comp({**ctx, h.ret_var: u}, h.ret_body, row)
        if h.result is not None:
            declared = self.resolve(h.result, row)
            if not subtype(t, declared):
                raise TypeCheckError(f"return clause has type {t}, expected {declared}", "handler", c)
            t = declared
        for cl in h.clauses:
            base, k = self.sig.ops[cl.op]
            cctx = {**ctx, cl.var: Base(base)}
            if h.kind == "generic":
                if cl.cont is not None:
                    raise TypeCheckError("generic clauses have no continuation", "handler", c)
                if k == 0:
                    raise ArityMismatch(f"generic clause for arity-0 {cl.op}", "handler", c)
                ct = self.comp(cctx, cl.body, row)
                if not subtype(ct, Enum(k)):
                    raise TypeCheckError(f"generic clause for {cl.op} has type {ct}", "handler", c)
                continue
            if cl.cont is None:
                raise TypeCheckError(f"clause for {cl.op} lacks a continuation", "handler", c)
            if k > 0:
                cod = t if h.kind == "deep" else u
                cctx[cl.cont] = Arrow(Enum(k), cod, row if h.kind == "deep" else inner)
            ct = self.comp(cctx, cl.body, row)
            if not subtype(ct, t):
                raise TypeCheckError(f"clause for {cl.op} has type {ct}, expected {t}", "handler", c)
        return t

    # -- entry point
    def check(self, ctx: Mapping[str, EffType], term: Term, row: Iterable[str] | None = None) -> EffType:
        r = self._row(row)
        ctx = {k: (self.resolve(v, r) if self.rows else v) for k, v in ctx.items()}
        if is_value(term):
            return self.value(ctx, term, r)
        return self.comp(ctx, term, r)


def typecheck(sig: EffectSignature, ctx: Mapping[str, EffType], term: Term,
              mode: str = "epcf", row: Iterable[str] | None = None) -> EffType:
    return Checker(sig, mode).check(ctx, term, row)


def typecheck_epcf(sig: EffectSignature, ctx: Mapping[str, EffType], term: Term) -> EffType:
    return typecheck(sig, ctx, term, "epcf")


def typecheck_hepcf(sig: EffectSignature, ctx: Mapping[str, EffType], row: Iterable[str],
                    term: Term) -> EffType:
    return typecheck(sig, ctx, term, "hepcf", row)


def typecheck_gepcf(sig: EffectSignature, ctx: Mapping[str, EffType], row: Iterable[str],
                    term: Term) -> EffType:
    return typecheck(sig, ctx, term, "gepcf", row)


def elaborate(sig: EffectSignature, term: Term, row: Iterable[str] | None = None) -> Term:
    """Fill unannotated λ rows with the ambient row and handler rows with the
    handled operations, so the term keeps its type wherever it is moved."""
    return _elab(sig, term, sig.row(row) if row is not None else sig.full_row)


def _elab(sig: EffectSignature, t: Term, row: tuple[str, ...]) -> Term:
    match t:
        case Lam(var=x, ty=ty, body=b, row=r):
            inner = sig.row(r) if r is not None else row
            return Lam(x, _elab_type(sig, ty, row), _elab(sig, b, inner), inner, t.loc)
        case Fix(var=f, ty=ty, body=b):
            return Fix(f, _elab_type(sig, ty, row), _elab(sig, b, row), t.loc)
        case Succ(pred=p):
            return Succ(_elab(sig, p, row), t.loc)
        case App(fun=f, arg=a):
            return App(_elab(sig, f, row), _elab(sig, a, row), t.loc)
        case Return(value=v):
            return Return(_elab(sig, v, row), t.loc)
        case Let(var=x, comp=m, body=b):
            return Let(x, _elab(sig, m, row), _elab(sig, b, row), t.loc)
        case Op(op=op, param=p, var=x, body=b):
            return Op(op, _elab(sig, p, row), x, None if b is None else _elab(sig, b, row), t.loc)
        case Case(scrut=v, branches=bs):
            return Case(_elab(sig, v, row), tuple(_elab(sig, b, row) for b in bs), t.loc)
        case CaseNat(scrut=v, zero=z, var=x, succ=s):
            return CaseNat(_elab(sig, v, row), _elab(sig, z, row), x, _elab(sig, s, row), t.loc)
        case Handle(handler=h, body=b):
            inner = sig.row(h.row) if h.row is not None else sig.row(h.handled)
            clauses = tuple(Clause(c.op, c.var, c.cont, _elab(sig, c.body, row), c.loc) for c in h.clauses)
            nh = Handler(h.ret_var, _elab(sig, h.ret_body, row), clauses, h.kind, inner,
                         _elab_type(sig, h.result, row), h.loc)
            return Handle(nh, _elab(sig, b, inner), t.loc)
    return t


def _elab_type(sig: EffectSignature, ty: EffType | None, row) -> EffType | None:
    if isinstance(ty, Arrow):
        return Arrow(_elab_type(sig, ty.dom, row), _elab_type(sig, ty.cod, row),
                     sig.row(ty.row) if ty.row is not None else row)
    return ty


# ---------------------------------------------------------------------------
# small-step semantics


@dataclass(frozen=True)
class Stepped:
    comp: Term
    unfolded: bool = False


@dataclass(frozen=True)
class NormalReturn:
    value: Term


@dataclass(frozen=True)
class NormalOp:
    op: str
    param: Term
    var: str
    body: Term | None


StepOutcome = Stepped | NormalReturn | NormalOp


def step(c: Term, sig: EffectSignature | None = None) -> StepOutcome:
    """One deterministic reduction step of a closed computation.

    ``sig`` supplies operation arities, used to annotate the continuation
    λs built by handler steps.
    """
    match c:
        case Return(value=v):
            return NormalReturn(v)
        case Op(op=op, param=p, var=x, body=b):
            return NormalOp(op, p, x, b)
        case App(fun=f, arg=a):
            if isinstance(f, Lam):
                return Stepped(subst(f.body, f.var, a))
            if isinstance(f, Fix):
                return Stepped(App(subst(f.body, f.var, f), a), True)
            raise AssertionError(f"stuck application of {type(f).__name__}")
        case Let(var=x, comp=m, body=b):
            out = step(m, sig)
            match out:
                case Stepped(comp=m2, unfolded=u):
                    return Stepped(Let(x, m2, b), u)
                case NormalReturn(value=v):
                    return Stepped(subst(b, x, v))
                case NormalOp(op=op, param=p, var=y, body=k):
                    # the computation is closed, so y cannot capture in b
                    return Stepped(Op(op, p, y, None if k is None else Let(x, k, b)))
        case Case(scrut=v, branches=bs):
            if not isinstance(v, Num):
                raise AssertionError("stuck case")
            return Stepped(bs[v.n])
        case CaseNat(scrut=v, zero=z, var=x, succ=s):
            if isinstance(v, Zero):
                return Stepped(z)
            if isinstance(v, Succ):
                return Stepped(subst(s, x, v.pred))
            raise AssertionError("stuck case on Nat")
        case Handle(handler=h, body=body):
            out = step(body, sig)
            match out:
                case Stepped(comp=b2, unfolded=u):
                    return Stepped(Handle(h, b2), u)
                case NormalReturn(value=v):
                    return Stepped(subst(h.ret_body, h.ret_var, v))
                case NormalOp(op=op, param=p, var=y, body=k):
                    return Stepped(_handle_op(h, op, p, y, k, sig))
    raise AssertionError(f"not a computation: {type(c).__name__}")


def _handle_op(h: Handler, op: str, p: Term, y: str, k: Term | None,
               sig: EffectSignature | None) -> Term:
    cl = h.clause(op)
    if cl is None:
        # forward unhandled operations
        return Op(op, p, y, None if k is None else Handle(h, k))
    body = subst(cl.body, cl.var, p)
    if h.kind == "generic":
        return Let(y, body, Handle(h, k))
    if k is None or cl.cont is None:
        return body
    arity = sig.arity(op) if sig is not None and op in sig.ops else None
    ty = Enum(arity) if arity else None
    resumed = Handle(h, k) if h.kind == "deep" else k
    return subst(body, cl.cont, Lam(y, ty, resumed))


@dataclass(frozen=True)
class Diverged:
    witness: Term
    cycle_length: int


@dataclass(frozen=True)
class BudgetExceeded:
    budget: int


def run(c: Term, sig: EffectSignature | None = None, budget: int = DEFAULT_BUDGET):
    """Reduce to a normal form. Configurations are compared (alpha-canonically)
    at fixpoint unfoldings; a revisit proves divergence."""
    seen: dict[int, int] = {}
    for n in range(budget + 1):
        out = step(c, sig)
        if not isinstance(out, Stepped):
            return out
        if n == budget:
            break
        if out.unfolded:
            k = alpha_key(c)
            if k in seen:
                return Diverged(c, n - seen[k])
            seen[k] = n
        c = out.comp
    return BudgetExceeded(budget)


# ---------------------------------------------------------------------------
# effect trees


def return_label(v: Term) -> str:
    from effectree import syntax

    return f"return({syntax.show(v)})"


def value_label(v: Term) -> str:
    from effectree import syntax

    return syntax.show(v)


class ValueLeaf:
    __slots__ = ("value",)

    def __init__(self, value: Term) -> None:
        self.value = value

    def expand(self):
        return value_label(self.value), ()

    def key(self):
        return ("value", alpha_key(self.value))


class EffectTreeGenerator:
    """Lazy ``ET(C)``: operation nodes have the parameter as first child."""

    __slots__ = ("comp", "sig", "budget", "_out")

    def __init__(self, comp: Term, sig: EffectSignature | None = None,
                 budget: int = DEFAULT_BUDGET) -> None:
        self.comp = comp
        self.sig = sig
        self.budget = budget
        self._out = None

    def resolve(self):
        if self._out is None:
            if free_vars(self.comp):
                raise ValueError("effect tree of an open computation")
            self._out = run(self.comp, self.sig, self.budget)
        return self._out

    def branches(self, out: NormalOp) -> tuple["EffectTreeGenerator", ...]:
        if out.body is None:
            return ()
        k = self.sig.arity(out.op) if self.sig is not None else None
        if k is None:
            raise ValueError("operation arity unknown: pass the effect signature")
        return tuple(EffectTreeGenerator(subst(out.body, out.var, Num(i, k)), self.sig, self.budget)
                     for i in range(k))

    def expand(self):
        out = self.resolve()
        match out:
            case NormalReturn(value=v):
                return return_label(v), ()
            case NormalOp():
                return out.op, (ValueLeaf(out.param),) + self.branches(out)
            case Diverged():
                return BOTTOM, ()
        return UNKNOWN, ()

    def key(self):
        return alpha_key(self.comp)
