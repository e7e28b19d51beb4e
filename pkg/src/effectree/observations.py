"""Observation automata: nondeterminism (may / must), store coherence and
the eventually-c example."""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping

from effectree.apt import Apt, Atom, TT, add_parameter_branch, conj, disj, indexed

TRUE, FALSE = "tt", "ff"


def eventually_c() -> Apt:
    """Over ``{a:2, b:1, c:0}``: on every path, ``c`` eventually follows ``b``."""
    states = ("q0", "q1")
    delta = {}
    for q in states:
        delta[(q, "a")] = conj([Atom(0, q), Atom(1, q)])
        delta[(q, "b")] = Atom(0, "q1")
        delta[(q, "c")] = TT()
    return Apt({"a": 2, "b": 1, "c": 0}, states, "q0", {"q0": 2, "q1": 1}, delta)


def _nondeterminism(P: Iterable[str], ops: Mapping[str, int], leaves: Iterable[str],
                    params: Iterable[str], combine) -> Apt:
    P = set(P)
    offset = 1 if params is not None else 0
    alphabet = {op: k + offset for op, k in ops.items()}
    for a in leaves:
        alphabet.setdefault(a, 0)
    for v in params or ():
        alphabet.setdefault(v, 0)
    delta = {("q", op): combine([Atom(i + offset, "q") for i in range(k)]) for op, k in ops.items()}
    delta.update({("q", a): TT() for a in P})
    return Apt(alphabet, ("q",), "q", {"q": 1}, delta)


def must(P: Iterable[str], ops: Mapping[str, int], leaves: Iterable[str],
         params: Iterable[str] | None = None) -> Apt:
    """Every branch is finite and ends in a leaf of ``P``: ``δ(q, op) = ⋀ (i, q)``,
    ``Ω(q) = 1``.  With ``params``, child 0 of each operation is its parameter."""
    return _nondeterminism(P, ops, set(leaves) | set(P), params, conj)


def may(P: Iterable[str], ops: Mapping[str, int], leaves: Iterable[str],
        params: Iterable[str] | None = None) -> Apt:
    """Some finite branch ends in a leaf of ``P``.  One state suffices: the
    run is a single branch and priority 1 forbids it from being infinite."""
    return _nondeterminism(P, ops, set(leaves) | set(P), params, disj)


def store_states(locations: Iterable[str]) -> list[dict[str, str]]:
    locs = list(locations)
    return [dict(zip(locs, bits)) for bits in itertools.product((TRUE, FALSE), repeat=len(locs))]


def store_name(store: Mapping[str, str]) -> str:
    return ",".join(f"{l}={b}" for l, b in store.items())


def store_automaton(initial: Mapping[str, str], accepted: Iterable[str], final: Mapping[str, str] | None = None,
                    get: str = "Get", set_: str = "Set", raise_: str = "Raise", unit: str = "()",
                    ok: str = "OK") -> Apt:
    """Deterministic automaton over the indexed alphabet ``Get[ℓ]``, ``Set[ℓ.b]``,
    ``Raise[()]`` whose states are stores plus ``OK``.

    A Get proceeds into the branch agreeing with the store (``tt ↦ 1̄``) and
    sends the other branch to ``OK``, where everything is accepted.  From a
    store, Raise is rejected and a leaf is accepted iff it is in ``accepted``
    (and the store equals ``final``, when given).  All priorities are even,
    so infinite coherent branches are fine.
    """
    locs = list(initial)
    stores = store_states(locs)
    names = [store_name(s) for s in stores]
    if ok in names:
        raise ValueError("OK clashes with a store name")
    accepted = list(accepted)
    alphabet: dict[str, int] = {indexed(get, l): 2 for l in locs}
    alphabet.update({indexed(set_, f"{l}.{b}"): 1 for l in locs for b in (TRUE, FALSE)})
    alphabet[indexed(raise_, unit)] = 0
    alphabet.update({a: 0 for a in accepted})
    delta = {}
    for s, name in zip(stores, names):
        for l in locs:
            here = 1 if s[l] == TRUE else 0
            delta[(name, indexed(get, l))] = conj([Atom(here, name), Atom(1 - here, ok)])
            for b in (TRUE, FALSE):
                delta[(name, indexed(set_, f"{l}.{b}"))] = Atom(0, store_name({**s, l: b}))
        if final is None or s == dict(final):
            for a in accepted:
                delta[(name, a)] = TT()
    for sym in alphabet:
        delta[(ok, sym)] = TT()
    return Apt(alphabet, tuple(names) + (ok,), store_name(dict(initial)),
               {q: 0 for q in names + [ok]}, delta)


def store_safety(initial: Mapping[str, str], accepted: Iterable[str], final: Mapping[str, str] | None = None,
                 get: str = "Get", set_: str = "Set", raise_: str = "Raise", unit: str = "()") -> Apt:
    """The store automaton moved to effect trees with parameter children."""
    a = store_automaton(initial, accepted, final, get, set_, raise_, unit)
    locs = list(initial)
    values = {get: locs, set_: [f"{l}.{b}" for l in locs for b in (TRUE, FALSE)], raise_: [unit]}
    return add_parameter_branch(a, values)
