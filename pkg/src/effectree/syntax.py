"""S-expression surface syntax for every calculus, with a printer whose output
parses back to the same tree.

A source file is a sequence of declarations followed by one term::

    (calculus epcf)
    (base Loc r q)
    (product LocBool Loc Bool)      ; constants r.tt, r.ff, ...
    (op Flip Unit 2)
    (row Flip)                      ; ambient row (hepcf / gepcf)
    (term (op-call Flip () (y (return y))))

λY files use ``(sig (g 2) (f 1) (a 0))`` instead of base/op declarations.
"""

from __future__ import annotations

import os

import itertools
from dataclasses import dataclass, field
from typing import Any

from effectree import effects as E
from effectree import lambda_y as L
from effectree.binding import Term, Var, fresh_name
from effectree.errors import DuplicateDeclaration, ParseError

CALCULI = ("lambda-y", "epcf", "hepcf", "gepcf", "pcf")


# ---------------------------------------------------------------------------
# reader


@dataclass(frozen=True)
class Pos:
    offset: int
    line: int
    col: int


@dataclass(frozen=True)
class Atom:
    text: str
    pos: Pos


@dataclass(frozen=True)
class SList:
    items: tuple
    pos: Pos


def _error(msg: str, pos: Pos | None) -> ParseError:
    if pos is None:
        return ParseError(msg)
    return ParseError(msg, pos.offset, pos.line, pos.col)


def read_all(text: str) -> list:
    """Read every s-expression in ``text``; ``;`` starts a line comment."""
    out: list = []
    stack: list[tuple[list, Pos]] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def here() -> Pos:
        return Pos(i, line, col)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            stack.append(([], here()))
            i, col = i + 1, col + 1
            continue
        if ch == ")":
            if not stack:
                raise _error("unexpected ')'", here())
            items, pos = stack.pop()
            node = SList(tuple(items), pos)
            (stack[-1][0] if stack else out).append(node)
            i, col = i + 1, col + 1
            continue
        start = here()
        j = i
        while j < n and not text[j].isspace() and text[j] not in "();":
            j += 1
        atom = Atom(text[i:j], start)
        (stack[-1][0] if stack else out).append(atom)
        col += j - i
        i = j
    if stack:
        raise _error("unclosed '('", stack[-1][1])
    return out


def read_one(text: str):
    forms = read_all(text)
    if len(forms) != 1:
        raise _error(f"expected one expression, found {len(forms)}", Pos(0, 1, 1))
    return forms[0]


def _head(x) -> str | None:
    if isinstance(x, SList) and x.items and isinstance(x.items[0], Atom):
        return x.items[0].text
    return None


def _atom(x, what: str) -> str:
    if not isinstance(x, Atom):
        raise _error(f"expected {what}", x.pos)
    return x.text


def _const_name(x) -> str:
    """A λY constant name; ``()`` names the unit constant."""
    if isinstance(x, SList) and not x.items:
        return E.UNIT_VALUE
    return _atom(x, "constant name")


def _int(x, what: str) -> int:
    s = _atom(x, what)
    try:
        return int(s)
    except ValueError:
        raise _error(f"expected {what}, got {s!r}", x.pos) from None


def _arity(x, n: int | tuple[int, ...], what: str) -> None:
    ok = (n,) if isinstance(n, int) else n
    if not isinstance(x, SList) or len(x.items) not in ok:
        raise _error(f"malformed {what}", x.pos)


# ---------------------------------------------------------------------------
# source files


@dataclass
class SourceFile:
    calculus: str
    signature: Any  # lambda_y.Signature or effects.EffectSignature
    term: Term
    row: tuple[str, ...] | None = None
    apt: str | None = None
    sig_order: tuple[str, ...] = ()
    declarations: dict = field(default_factory=dict)


def parse(text: str, calculus: str | None = None) -> SourceFile:
    forms = read_all(text)
    tag = calculus
    ly_sig: dict[str, int] = {}
    bases: dict[str, tuple[str, ...]] = {}
    ops: dict[str, tuple[str, int]] = {}
    row = None
    apt = None
    term_form = None
    seen: set[tuple[str, str]] = set()

    def declare(kind: str, name: str, pos: Pos) -> None:
        if (kind, name) in seen:
            raise DuplicateDeclaration(f"duplicate {kind} declaration {name}", pos.offset, pos.line, pos.col)
        seen.add((kind, name))

    for f in forms:
        h = _head(f)
        if h == "calculus":
            _arity(f, 2, "calculus declaration")
            declare("calculus", "", f.pos)
            tag = _atom(f.items[1], "calculus name")
            if tag not in CALCULI:
                raise _error(f"unknown calculus {tag}", f.pos)
        elif h == "sig":
            for entry in f.items[1:]:
                _arity(entry, 2, "signature entry")
                name = _const_name(entry.items[0])
                declare("constant", name, entry.pos)
                ly_sig[name] = _int(entry.items[1], "arity")
        elif h == "base":
            name = _atom(f.items[1], "base type name")
            declare("type", name, f.pos)
            bases[name] = tuple(_atom(c, "constant") for c in f.items[2:])
        elif h == "product":
            name = _atom(f.items[1], "product name")
            declare("type", name, f.pos)
            parts = []
            for c in f.items[2:]:
                b = _atom(c, "base type")
                if b not in bases and b != E.UNIT:
                    raise _error(f"undeclared base type {b}", c.pos)
                parts.append(bases.get(b, (E.UNIT_VALUE,)))
            bases[name] = tuple(".".join(p) for p in itertools.product(*parts))
        elif h == "op":
            _arity(f, 4, "operation declaration")
            name = _atom(f.items[1], "operation name")
            declare("operation", name, f.pos)
            ops[name] = (_atom(f.items[2], "base type"), _int(f.items[3], "arity"))
        elif h == "row":
            declare("row", "", f.pos)
            row = tuple(_atom(x, "operation") for x in f.items[1:])
        elif h == "apt":
            _arity(f, 2, "apt reference")
            declare("apt", "", f.pos)
            apt = _atom(f.items[1], "path")
        elif h == "term":
            _arity(f, 2, "term")
            declare("term", "", f.pos)
            term_form = f.items[1]
        else:
            raise _error(f"unknown declaration {h!r}", f.pos)
    if term_form is None:
        raise _error("no (term ...) in source", Pos(len(text), 1, 1))
    if tag is None:
        tag = "lambda-y" if ly_sig and not ops else "epcf"
    if tag == "lambda-y":
        sig = L.Signature(ly_sig)
        term = LYParser(sig).term(term_form, frozenset())
        return SourceFile(tag, sig, term, None, apt, tuple(ly_sig))
    try:
        esig = E.EffectSignature(bases, ops)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if row is not None:
        row = esig.row(row)
    term = EffParser(esig, tag).term(term_form, frozenset())
    return SourceFile(tag, esig, term, row, apt)


def parse_file(path: str | os.PathLike) -> SourceFile:
    path = os.fspath(path)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse(text, "lambda-y" if path.endswith(".ly") else None)


# ---------------------------------------------------------------------------
# λY


class LYParser:
    def __init__(self, sig: L.Signature) -> None:
        self.sig = sig

    def type(self, x) -> L.LYType:
        if isinstance(x, Atom):
            if x.text == "o":
                return L.O
            raise _error(f"unknown λY type {x.text}", x.pos)
        if _head(x) == "->" and len(x.items) >= 3:
            return L.arrows(*(self.type(t) for t in x.items[1:]))
        raise _error("malformed λY type", x.pos)

    def term(self, x, bound: frozenset) -> Term:
        if isinstance(x, Atom):
            name = x.text
            if name not in bound and name in self.sig:
                return L.Const(name, x.pos)
            return Var(name, x.pos)
        if not x.items and E.UNIT_VALUE in self.sig:
            return L.Const(E.UNIT_VALUE, x.pos)
        h = _head(x)
        if h == "lam":
            if len(x.items) < 3:
                raise _error("malformed lam", x.pos)
            params = [self._binder(b) for b in x.items[1:-1]]
            body = self.term(x.items[-1], bound | {p for p, _ in params})
            for (name, ty), b in zip(reversed(params), reversed(x.items[1:-1])):
                body = L.Lam(name, ty, body, b.pos)
            return body
        if h == "app":
            if len(x.items) < 3:
                raise _error("malformed app", x.pos)
            t = self.term(x.items[1], bound)
            for a in x.items[2:]:
                t = L.App(t, self.term(a, bound), a.pos)
            return t
        if h == "Y":
            _arity(x, 2, "Y")
            return L.Y(self.term(x.items[1], bound), x.pos)
        raise _error(f"unknown λY form {h!r}", x.pos)

    def _binder(self, b) -> tuple[str, L.LYType | None]:
        if isinstance(b, Atom):
            return b.text, None
        _arity(b, 2, "binder")
        return _atom(b.items[0], "variable"), self.type(b.items[1])


# ---------------------------------------------------------------------------
# effect calculi


_COMP_HEADS = {"app", "return", "let", "op-call", "case", "case-nat", "handle",
               "shallow-handle", "xor", "not", "seq"}


class EffParser:
    def __init__(self, sig: E.EffectSignature, calculus: str = "epcf") -> None:
        self.sig = sig
        self.calculus = calculus
        self._fresh = itertools.count()

    # -- types
    def type(self, x) -> E.EffType:
        if isinstance(x, Atom):
            t = x.text
            if t == "Nat":
                return E.Nat
            if t == "Never":
                return E.Never()
            if t.isdigit():
                k = int(t)
                if k < 1:
                    raise _error("Enum(k) requires k >= 1", x.pos)
                return E.Enum(k)
            return E.Base(t)
        if _head(x) == "->" and len(x.items) >= 3:
            items = list(x.items[1:])
            row = None
            if _head(items[-1]) == "row":
                row = self._row(items.pop())
            if len(items) < 2:
                raise _error("malformed arrow type", x.pos)
            return E.fun(*(self.type(t) for t in items), row=row)
        raise _error("malformed type", x.pos)

    def _row(self, x) -> tuple[str, ...]:
        names = [_atom(a, "operation") for a in x.items[1:]]
        try:
            return self.sig.row(names)
        except Exception as exc:
            raise _error(str(exc), x.pos) from None

    def _gensym(self, base: str, avoid: set[str]) -> str:
        return fresh_name(f"{base}{next(self._fresh)}", avoid)

    # -- dispatch
    def term(self, x, bound: frozenset) -> Term:
        if isinstance(x, SList) and _head(x) in _COMP_HEADS:
            return self.comp(x, bound)
        return self.value(x, bound)

    def value(self, x, bound: frozenset) -> Term:
        if isinstance(x, Atom):
            name = x.text
            if name in bound:
                return Var(name, x.pos)
            if self.sig.base_of(name) is not None:
                return E.Const(name, x.pos)
            if name.isdigit():
                return E.nat(int(name))
            return Var(name, x.pos)
        if not x.items:
            return E.Const(E.UNIT_VALUE, x.pos)
        h = _head(x)
        if h == "num":
            _arity(x, 3, "numeral")
            n, k = _int(x.items[1], "index"), _int(x.items[2], "arity")
            if not 0 <= n < k:
                raise _error(f"numeral {n} out of range for {k}", x.pos)
            return E.Num(n, k, x.pos)
        if h == "lam":
            return self._lam(x, bound)
        if h == "fix":
            _arity(x, (3, 4), "fix")
            f = _atom(x.items[1], "variable")
            ty = self.type(x.items[2]) if len(x.items) == 4 else None
            return E.Fix(f, ty, self.value(x.items[-1], bound | {f}), x.pos)
        if h == "succ":
            _arity(x, 2, "succ")
            return E.Succ(self.value(x.items[1], bound), x.pos)
        if h in _COMP_HEADS:
            raise _error(f"expected a value, found computation {h}", x.pos)
        raise _error(f"unknown value form {h!r}", x.pos)

    def _lam(self, x, bound: frozenset) -> Term:
        items = list(x.items[1:])
        if len(items) < 2:
            raise _error("malformed lam", x.pos)
        body = items.pop()
        row = None
        if items and _head(items[-1]) == "row":
            row = self._row(items.pop())
        if not items:
            raise _error("lam without binder", x.pos)
        params = []
        for b in items:
            if isinstance(b, Atom):
                params.append((b.text, None, b.pos))
            else:
                _arity(b, 2, "binder")
                params.append((_atom(b.items[0], "variable"), self.type(b.items[1]), b.pos))
        inner = bound | {p for p, _, _ in params}
        result = self.comp(body, inner)
        # λx y.C ≜ λx. return(λy. C)
        for i, (name, ty, pos) in enumerate(reversed(params)):
            if i:
                result = E.Return(result, pos)
            result = E.Lam(name, ty, result, row, pos)
        return result

    def comp(self, x, bound: frozenset) -> Term:
        if not isinstance(x, SList) or _head(x) not in _COMP_HEADS:
            raise _error("expected a computation", x.pos)
        h = _head(x)
        it = x.items
        if h == "return":
            _arity(x, 2, "return")
            return E.Return(self.value(it[1], bound), x.pos)
        if h == "app":
            if len(it) < 3:
                raise _error("malformed app", x.pos)
            f = self.value(it[1], bound)
            args = [self.value(a, bound) for a in it[2:]]
            # V W1 W2 ≜ let x = V W1 in x W2
            result: Term = E.App(f, args[0], x.pos)
            for a in args[1:]:
                v = self._gensym("_f", bound)
                result = E.Let(v, result, E.App(Var(v), a), x.pos)
            return result
        if h == "let":
            _arity(x, 4, "let")
            v = _atom(it[1], "variable")
            return E.Let(v, self.comp(it[2], bound), self.comp(it[3], bound | {v}), x.pos)
        if h == "seq":
            if len(it) < 2:
                raise _error("malformed seq", x.pos)
            comps = list(it[1:])
            result = self.comp(comps.pop(), bound)
            for c in reversed(comps):
                v = self._gensym("_s", bound)
                result = E.Let(v, self.comp(c, bound), result, c.pos)
            return result
        if h == "op-call":
            _arity(x, (3, 4), "op-call")
            op = _atom(it[1], "operation")
            p = self.value(it[2], bound)
            if len(it) == 3:
                return E.Op(op, p, "_", None, x.pos)
            _arity(it[3], 2, "continuation binder")
            v = _atom(it[3].items[0], "variable")
            return E.Op(op, p, v, self.comp(it[3].items[1], bound | {v}), x.pos)
        if h == "case":
            if len(it) < 3:
                raise _error("malformed case", x.pos)
            return E.Case(self.value(it[1], bound), tuple(self.comp(b, bound) for b in it[2:]), x.pos)
        if h == "case-nat":
            _arity(x, 4, "case-nat")
            _arity(it[3], 2, "successor branch")
            n = _atom(it[3].items[0], "variable")
            return E.CaseNat(self.value(it[1], bound), self.comp(it[2], bound), n,
                             self.comp(it[3].items[1], bound | {n}), x.pos)
        if h in ("handle", "shallow-handle"):
            _arity(x, 3, h)
            hd = self.handler(it[1], bound, shallow=h == "shallow-handle")
            return E.Handle(hd, self.comp(it[2], bound), x.pos)
        if h == "xor":
            _arity(x, 3, "xor")
            a, b = self.value(it[1], bound), self.value(it[2], bound)
            return xor(a, b)
        if h == "not":
            _arity(x, 2, "not")
            return negate(self.value(it[1], bound))
        raise AssertionError(h)

    def handler(self, x, bound: frozenset, shallow: bool = False) -> E.Handler:
        if _head(x) != "handler":
            raise _error("expected (handler ...)", x.pos)
        ret = None
        clauses = []
        row = None
        result = None
        kind = None
        for c in x.items[1:]:
            if isinstance(c, Atom):
                if c.text in E.HANDLER_KINDS:
                    kind = c.text
                    continue
                raise _error(f"unexpected {c.text} in handler", c.pos)
            h = _head(c)
            if h == "return":
                _arity(c, 3, "return clause")
                v = _atom(c.items[1], "variable")
                ret = (v, self.comp(c.items[2], bound | {v}))
            elif h == "row":
                row = self._row(c)
            elif h == "result":
                _arity(c, 2, "result type")
                result = self.type(c.items[1])
            elif len(c.items) == 4:
                op, v, r = (_atom(c.items[i], "name") for i in range(3))
                clauses.append(E.Clause(op, v, r, self.comp(c.items[3], bound | {v, r}), c.pos))
            elif len(c.items) == 3:
                op, v = _atom(c.items[0], "operation"), _atom(c.items[1], "variable")
                clauses.append(E.Clause(op, v, None, self.comp(c.items[2], bound | {v}), c.pos))
            else:
                raise _error("malformed handler clause", c.pos)
        if ret is None:
            v = "x"
            ret = (v, E.Return(Var(v)))
        if kind is None:
            if shallow:
                kind = "shallow"
            elif clauses and all(cl.cont is None for cl in clauses):
                kind = "generic"
            else:
                kind = "deep"
        if shallow and kind != "shallow":
            raise _error("shallow-handle needs a shallow handler", x.pos)
        if kind != "generic" and any(cl.cont is None for cl in clauses):
            raise _error("clause without continuation in a non-generic handler", x.pos)
        return E.Handler(ret[0], ret[1], tuple(clauses), kind, row, result, x.pos)


def parse_term(text: str, signature, calculus: str = "epcf") -> Term:
    form = read_one(text)
    if calculus == "lambda-y":
        return LYParser(signature).term(form, frozenset())
    return EffParser(signature, calculus).term(form, frozenset())


def parse_type(text: str, signature=None, calculus: str = "epcf"):
    form = read_one(text)
    if calculus == "lambda-y":
        return LYParser(signature or L.Signature({})).type(form)
    return EffParser(signature or E.EffectSignature({}, {}), calculus).type(form)


# ---------------------------------------------------------------------------
# library terms


def xor(a: Term, b: Term) -> Term:
    zero, one = E.Return(E.Num(0, 2)), E.Return(E.Num(1, 2))
    return E.Case(a, (E.Case(b, (zero, one)), E.Case(b, (one, zero))))


def negate(a: Term) -> Term:
    return E.Case(a, (E.Return(E.Num(1, 2)), E.Return(E.Num(0, 2))))


# ---------------------------------------------------------------------------
# printing


def show_type(t) -> str:
    match t:
        case L.Ground():
            return "o"
        case L.Arrow(dom=d, cod=c):
            return f"(-> {show_type(d)} {show_type(c)})"
        case E.Base(name=n):
            return n
        case E.Enum(k=k):
            return str(k)
        case E.NatT():
            return "Nat"
        case E.Never():
            return "Never"
        case E.Arrow(dom=d, cod=c, row=r):
            rs = "" if r is None else " " + _show_row(r)
            return f"(-> {show_type(d)} {show_type(c)}{rs})"
    raise TypeError(f"not a type: {t!r}")


def _show_row(r) -> str:
    return "(row" + "".join(" " + o for o in r) + ")"


def show(t: Term) -> str:
    match t:
        case Var(name=n):
            return n
        # λY
        case L.Const(name=n):
            return n
        case L.Lam(var=x, ty=ty, body=b):
            binder = x if ty is None else f"({x} {show_type(ty)})"
            return f"(lam {binder} {show(b)})"
        case L.App(fun=f, arg=a):
            return f"(app {show(f)} {show(a)})"
        case L.Y(body=b):
            return f"(Y {show(b)})"
        # values
        case E.Const(name=n):
            return n
        case E.Num(n=n, k=k):
            return f"(num {n} {k})"
        case E.Lam(var=x, ty=ty, body=b, row=r):
            binder = x if ty is None else f"({x} {show_type(ty)})"
            rs = "" if r is None else " " + _show_row(r)
            return f"(lam {binder}{rs} {show(b)})"
        case E.Fix(var=f, ty=ty, body=b):
            ts = "" if ty is None else " " + show_type(ty)
            return f"(fix {f}{ts} {show(b)})"
        case E.Zero():
            return "0"
        case E.Succ(pred=p):
            return f"(succ {show(p)})"
        # computations
        case E.App(fun=f, arg=a):
            return f"(app {show(f)} {show(a)})"
        case E.Return(value=v):
            return f"(return {show(v)})"
        case E.Let(var=x, comp=m, body=b):
            return f"(let {x} {show(m)} {show(b)})"
        case E.Op(op=op, param=p, var=x, body=b):
            if b is None:
                return f"(op-call {op} {show(p)})"
            return f"(op-call {op} {show(p)} ({x} {show(b)}))"
        case E.Case(scrut=v, branches=bs):
            return f"(case {show(v)} {' '.join(show(b) for b in bs)})"
        case E.CaseNat(scrut=v, zero=z, var=x, succ=s):
            return f"(case-nat {show(v)} {show(z)} ({x} {show(s)}))"
        case E.Handle(handler=h, body=b):
            kw = "shallow-handle" if h.kind == "shallow" else "handle"
            return f"({kw} {show_handler(h)} {show(b)})"
        case E.Handler():
            return show_handler(t)
    raise TypeError(f"cannot print {type(t).__name__}")


def show_handler(h: E.Handler) -> str:
    parts = ["handler"]
    if h.kind == "generic":
        parts.append("generic")
    parts.append(f"(return {h.ret_var} {show(h.ret_body)})")
    for c in h.clauses:
        if c.cont is None:
            parts.append(f"({c.op} {c.var} {show(c.body)})")
        else:
            parts.append(f"({c.op} {c.var} {c.cont} {show(c.body)})")
    if h.row is not None:
        parts.append(_show_row(h.row))
    if h.result is not None:
        parts.append(f"(result {show_type(h.result)})")
    return "(" + " ".join(parts) + ")"


def emit_lambda_y(sig: L.Signature, term: Term) -> str:
    entries = " ".join(f"({n} {a})" for n, a in sig.entries.items())
    return f"(calculus lambda-y)\n(sig {entries})\n(term {show(term)})\n"


def emit_effect(calculus: str, sig: E.EffectSignature, term: Term,
                row: tuple[str, ...] | None = None) -> str:
    lines = [f"(calculus {calculus})"]
    for b, cs in sig.bases.items():
        if b != E.UNIT:
            lines.append(f"(base {b} {' '.join(cs)})")
    for op, (b, k) in sig.ops.items():
        lines.append(f"(op {op} {b} {k})")
    if row is not None:
        lines.append(_show_row(row))
    lines.append(f"(term {show(term)})")
    return "\n".join(lines) + "\n"
