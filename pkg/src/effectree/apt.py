"""Alternating parity tree automata over labelled trees.

Transitions are positive Boolean formulas over atoms ``(i, q)`` (send state
``q`` to child ``i``).  Missing transitions default to ``ff``; a ⊥ node
satisfies nothing, so any state sent into ⊥ fails.

Acceptance is decided exactly on regular trees (finite graphs) through a
parity game, and soundly approximated on finite prefixes of arbitrary trees.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Mapping

from effectree.errors import AlphabetMismatch
from effectree.lambda_y import BOTTOM, UNKNOWN
from effectree.parity import EXISTS, FORALL, ParityGame, solve_parity
from effectree.syntax import Atom as SAtom, SList, read_one
from effectree.trees import RegularGraph, TreeGenerator, TreePrefix, prefix

# ---------------------------------------------------------------------------
# positive Boolean formulas


class BFormula:
    def __str__(self) -> str:
        return show_bformula(self)


@dataclass(frozen=True)
class TT(BFormula):
    pass


@dataclass(frozen=True)
class FF(BFormula):
    pass


@dataclass(frozen=True)
class Atom(BFormula):
    index: int
    state: str


@dataclass(frozen=True)
class And(BFormula):
    left: BFormula
    right: BFormula


@dataclass(frozen=True)
class Or(BFormula):
    left: BFormula
    right: BFormula


def conj(fs: Iterable[BFormula]) -> BFormula:
    fs = list(fs)
    return reduce(And, fs) if fs else TT()


def disj(fs: Iterable[BFormula]) -> BFormula:
    fs = list(fs)
    return reduce(Or, fs) if fs else FF()


def atoms(f: BFormula) -> set[tuple[int, str]]:
    match f:
        case Atom(index=i, state=q):
            return {(i, q)}
        case And(left=a, right=b) | Or(left=a, right=b):
            return atoms(a) | atoms(b)
    return set()


def eval_bformula(f: BFormula, Y) -> bool:
    """``Y ⊨ f``: atoms in ``Y`` read as tt, all others as ff."""
    match f:
        case TT():
            return True
        case FF():
            return False
        case Atom(index=i, state=q):
            return (i, q) in Y
        case And(left=a, right=b):
            return eval_bformula(a, Y) and eval_bformula(b, Y)
        case Or(left=a, right=b):
            return eval_bformula(a, Y) or eval_bformula(b, Y)
    raise TypeError(f"not a formula: {f!r}")


def evaluate(f: BFormula, atom) -> bool:
    """Evaluate with an arbitrary (lazy) valuation of atoms."""
    match f:
        case TT():
            return True
        case FF():
            return False
        case Atom(index=i, state=q):
            return atom(i, q)
        case And(left=a, right=b):
            return evaluate(a, atom) and evaluate(b, atom)
        case Or(left=a, right=b):
            return evaluate(a, atom) or evaluate(b, atom)
    raise TypeError(f"not a formula: {f!r}")


def minimal_models(f: BFormula) -> list[frozenset]:
    """The ⊆-minimal atom sets satisfying ``f``."""
    match f:
        case TT():
            sets = [frozenset()]
        case FF():
            sets = []
        case Atom(index=i, state=q):
            sets = [frozenset({(i, q)})]
        case And(left=a, right=b):
            sets = [x | y for x in minimal_models(a) for y in minimal_models(b)]
        case Or(left=a, right=b):
            sets = minimal_models(a) + minimal_models(b)
        case _:
            raise TypeError(f"not a formula: {f!r}")
    uniq = set(sets)
    return sorted((s for s in uniq if not any(o < s for o in uniq)), key=lambda s: (len(s), sorted(s)))


def shift(f: BFormula, by: int = 1) -> BFormula:
    """``f[+by]``: every atom's child index moved by ``by``."""
    match f:
        case Atom(index=i, state=q):
            return Atom(i + by, q)
        case And(left=a, right=b):
            return And(shift(a, by), shift(b, by))
        case Or(left=a, right=b):
            return Or(shift(a, by), shift(b, by))
    return f


def show_bformula(f: BFormula) -> str:
    match f:
        case TT():
            return "tt"
        case FF():
            return "ff"
        case Atom(index=i, state=q):
            return f"({i} {q})"
        case And():
            return f"(and {' '.join(show_bformula(x) for x in _flatten(f, And))})"
        case Or():
            return f"(or {' '.join(show_bformula(x) for x in _flatten(f, Or))})"
    raise TypeError(f"not a formula: {f!r}")


def _flatten(f: BFormula, cls) -> list[BFormula]:
    if isinstance(f, cls):
        return _flatten(f.left, cls) + _flatten(f.right, cls)
    return [f]


def parse_bformula(text: str) -> BFormula:
    """Prefix notation: ``tt``, ``ff``, ``(i q)``, ``(and f …)``, ``(or f …)``."""
    return _from_sexp(read_one(text))


def _from_sexp(x) -> BFormula:
    if isinstance(x, SAtom):
        if x.text == "tt":
            return TT()
        if x.text == "ff":
            return FF()
        raise ValueError(f"unexpected atom {x.text!r} in formula")
    items = x.items
    if not items:
        raise ValueError("empty formula")
    head = items[0]
    if isinstance(head, SAtom) and head.text in ("and", "or"):
        parts = [_from_sexp(i) for i in items[1:]]
        return conj(parts) if head.text == "and" else disj(parts)
    if len(items) == 2 and isinstance(head, SAtom) and isinstance(items[1], SAtom) and head.text.isdigit():
        return Atom(int(head.text), items[1].text)
    raise ValueError("malformed formula")


# ---------------------------------------------------------------------------
# automata


@dataclass(frozen=True)
class Apt:
    alphabet: Mapping[str, int]
    states: tuple[str, ...]
    initial: str
    priority: Mapping[str, int]
    delta: Mapping[tuple[str, str], BFormula] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial} is not a state")
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate states")
        for q in self.states:
            if self.priority.get(q, -1) < 0:
                raise ValueError(f"state {q} lacks a non-negative priority")
        for (q, a), f in self.delta.items():
            if q not in self.states:
                raise ValueError(f"transition from unknown state {q}")
            if a not in self.alphabet:
                raise AlphabetMismatch(f"transition on unknown symbol {a}")
            for i, q2 in atoms(f):
                if q2 not in self.states:
                    raise ValueError(f"transition δ({q}, {a}) mentions unknown state {q2}")
                if not 0 <= i < self.alphabet[a]:
                    raise ValueError(f"δ({q}, {a}) uses child {i} but {a} has arity {self.alphabet[a]}")

    def transition(self, q: str, symbol: str) -> BFormula:
        if symbol == BOTTOM:
            return FF()
        return self.delta.get((q, symbol), FF())

    def check_label(self, label: str, arity: int) -> None:
        if label in (BOTTOM, UNKNOWN):
            return
        if label not in self.alphabet:
            raise AlphabetMismatch(f"symbol {label!r} is not in the automaton's alphabet")
        if self.alphabet[label] != arity:
            raise AlphabetMismatch(f"symbol {label!r} has {arity} children, expected {self.alphabet[label]}")

    # -- JSON
    def to_json(self) -> dict:
        return {
            "alphabet": dict(self.alphabet),
            "states": list(self.states),
            "initial": self.initial,
            "priorities": {q: self.priority[q] for q in self.states},
            "transitions": [{"state": q, "symbol": a, "formula": show_bformula(f)}
                            for (q, a), f in self.delta.items()],
        }

    @staticmethod
    def from_json(data: dict) -> "Apt":
        delta = {(t["state"], t["symbol"]): parse_bformula(t["formula"]) for t in data.get("transitions", [])}
        return Apt(dict(data["alphabet"]), tuple(data["states"]), data["initial"],
                   dict(data["priorities"]), delta)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False)


def load_apt(path: str) -> Apt:
    with open(path, encoding="utf-8") as fh:
        return Apt.from_json(json.load(fh))


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Accept:
    certificate: str = ""


@dataclass(frozen=True)
class Reject:
    certificate: str = ""


@dataclass(frozen=True)
class Unknown:
    reason: str = ""


Verdict = Accept | Reject | Unknown


# ---------------------------------------------------------------------------
# finite prefixes


def _check_alphabet(t: TreePrefix, apt: Apt) -> None:
    stack = [t]
    while stack:
        n = stack.pop()
        apt.check_label(n.label, len(n.children))
        stack.extend(n.children)


def accepts_finite(t: TreePrefix, apt: Apt, unknown_ok: bool, state: str | None = None) -> bool:
    """Run-tree search on a finite prefix.  Every branch of a run ends at a
    node whose formula is satisfied by ∅, so the parity condition is void;
    Unknown leaves succeed iff ``unknown_ok``; ⊥ satisfies nothing."""
    memo: dict[tuple[int, str], bool] = {}

    def acc(node: TreePrefix, q: str) -> bool:
        key = (id(node), q)
        if key not in memo:
            if node.label == UNKNOWN:
                memo[key] = unknown_ok
            else:
                memo[key] = evaluate(apt.transition(q, node.label), lambda i, q2: acc(node.children[i], q2))
        return memo[key]

    return acc(t, state or apt.initial)


def bounded_check(gen: TreeGenerator | TreePrefix, apt: Apt, depth: int) -> Verdict:
    """Accept if a run exists on the depth-``depth`` prefix with Unknown
    failing; Reject if none exists even with Unknown succeeding."""
    t = gen if isinstance(gen, TreePrefix) else prefix(gen, depth)
    _check_alphabet(t, apt)
    if accepts_finite(t, apt, unknown_ok=False):
        return Accept(f"finite run-tree on the depth-{depth} prefix")
    if not accepts_finite(t, apt, unknown_ok=True):
        return Reject(f"no run-tree on the depth-{depth} prefix, even optimistically")
    return Unknown(f"depth {depth} does not settle acceptance")


# ---------------------------------------------------------------------------
# regular trees


def acceptance_game(graph: RegularGraph, apt: Apt) -> tuple[ParityGame, int]:
    """Game whose Exists-vertices are (vertex, state), with Exists choosing a
    minimal satisfying atom set and Forall choosing one atom of it."""
    for v in graph.vertices:
        label = graph.labels[v]
        if label == UNKNOWN:
            raise ValueError("regular graph contains an Unknown vertex")
        apt.check_label(label, len(graph.edges[v]))
    top = max(apt.priority.values(), default=0)
    win_p, lose_p = (top + 2) // 2 * 2, (top + 1) // 2 * 2 + 1
    owner: list[int] = [EXISTS, EXISTS]
    prio: list[int] = [win_p, lose_p]
    edges: list[list[int]] = [[0], [1]]
    WIN, LOSE = 0, 1
    ids: dict = {}

    def vertex(key, who: int, p: int) -> tuple[int, bool]:
        if key in ids:
            return ids[key], False
        ids[key] = len(owner)
        owner.append(who)
        prio.append(p)
        edges.append([])
        return ids[key], True

    root, _ = vertex((graph.root, apt.initial), EXISTS, apt.priority[apt.initial])
    stack = [(graph.root, apt.initial)]
    while stack:
        v, q = stack.pop()
        me = ids[(v, q)]
        models = minimal_models(apt.transition(q, graph.labels[v]))
        if not models:
            edges[me].append(LOSE)
        for s in models:
            if not s:
                edges[me].append(WIN)
                continue
            f, _ = vertex((v, q, s), FORALL, 0)
            edges[me].append(f)
            if edges[f]:
                continue
            for i, q2 in sorted(s):
                w, new = vertex((graph.edges[v][i], q2), EXISTS, apt.priority[q2])
                edges[f].append(w)
                if new:
                    stack.append((graph.edges[v][i], q2))
    return ParityGame(tuple(owner), tuple(prio), tuple(tuple(e) for e in edges)), root


def decide_regular(graph: RegularGraph, apt: Apt) -> Accept | Reject:
    game, root = acceptance_game(graph, apt)
    sol = solve_parity(game)
    cert = f"parity game with {game.size} vertices"
    return Accept(cert) if sol.winner[root] == EXISTS else Reject(cert)


# ---------------------------------------------------------------------------
# parameters as branches

_INDEXED = re.compile(r"^(?P<op>.+)\[(?P<value>.*)\]$")
_PLAIN = re.compile(r"[^\s()\[\];]+")


def indexed(op: str, value: str) -> str:
    """Name of the indexed symbol ``op_value``."""
    return f"{op}[{value}]"


def split_indexed(symbol: str) -> tuple[str, str] | None:
    m = _INDEXED.match(symbol)
    return (m["op"], m["value"]) if m else None


def add_parameter_branch(apt: Apt, values: Mapping[str, Iterable[str]]) -> Apt:
    """``A_p``: over the alphabet where ``op`` carries its parameter as child 0.

    ``values[op]`` lists the parameter labels of ``op``; the indexed symbols
    ``op[v]`` of ``apt`` are replaced by ``op`` with one more child.
    """
    values = {op: tuple(vs) for op, vs in values.items()}
    used = set(apt.states)
    qv: dict[str, str] = {}
    for vs in values.values():
        for v in vs:
            if v not in qv:
                name = f"q_{v}" if _PLAIN.fullmatch(v) else f"q_#{len(qv)}"
                while name in used:
                    name += "'"
                used.add(name)
                qv[v] = name
    alphabet: dict[str, int] = {}
    for sym, ar in apt.alphabet.items():
        sp = split_indexed(sym)
        if sp and sp[0] in values:
            alphabet[sp[0]] = ar + 1
        else:
            alphabet[sym] = ar
    for op, vs in values.items():
        arities = {apt.alphabet.get(indexed(op, v)) for v in vs}
        if None in arities or len(arities) != 1:
            raise AlphabetMismatch(f"indexed symbols of {op} missing or of different arities")
        for v in vs:
            if v in alphabet and alphabet[v] != 0:
                raise AlphabetMismatch(f"parameter {v} clashes with a symbol of positive arity")
            alphabet.setdefault(v, 0)
    delta: dict[tuple[str, str], BFormula] = {}
    for q in apt.states:
        for sym in alphabet:
            if sym in values:
                delta[(q, sym)] = disj(And(shift(apt.transition(q, indexed(sym, v))), Atom(0, qv[v]))
                                       for v in values[sym])
            elif sym in apt.alphabet:
                f = apt.transition(q, sym)
                if not isinstance(f, FF):
                    delta[(q, sym)] = f
    for v, s in qv.items():
        delta[(s, v)] = TT()
    priority = {**apt.priority, **{s: 0 for s in qv.values()}}
    return Apt(alphabet, apt.states + tuple(qv.values()), apt.initial, priority, delta)


def tree_p(t: TreePrefix) -> TreePrefix:
    """``t_p``: every ``op[v](t1…tk)`` becomes ``op(v, t1…tk)``."""
    kids = tuple(tree_p(c) for c in t.children)
    sp = split_indexed(t.label)
    if sp is None:
        return TreePrefix(t.label, kids)
    return TreePrefix(sp[0], (TreePrefix(sp[1]),) + kids)


# ---------------------------------------------------------------------------
# a complete check


def check_generator(gen: TreeGenerator, apt: Apt, depth: int, max_states: int = 4096) -> Verdict:
    """Decide exactly if the tree regularizes within ``max_states``; otherwise
    fall back to the bounded check."""
    from effectree.trees import Closed, regularize

    reg = regularize(gen, max_states)
    if isinstance(reg, Closed):
        return decide_regular(reg.graph, apt)
    return bounded_check(gen, apt, depth)
