"""Binder-aware syntax trees shared by every calculus in the package.

Term classes are frozen dataclasses. A class declares which of its fields hold
bound variable names and which child fields each binder scopes over, through
the ``binders`` class attribute::

    @dataclass(frozen=True)
    class Lam(Term):
        var: str
        ty: object
        body: Term
        binders = {"var": ("body",)}

From that declaration alone we derive free variables, capture-avoiding
substitution and an alpha-canonical key (de Bruijn style), so the λY core and
the effect calculi share one implementation.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from typing import Any, ClassVar, Iterable, Iterator

__all__ = [
    "Term",
    "Var",
    "free_vars",
    "subst",
    "subst_many",
    "rename",
    "alpha_key",
    "alpha_eq",
    "fresh_name",
    "all_names",
    "size",
    "children",
]


@dataclass(frozen=True)
class Term:
    binders: ClassVar[dict[str, tuple[str, ...]]] = {}

    def __str__(self) -> str:
        from effectree import syntax

        return syntax.show(self)


@dataclass(frozen=True)
class Var(Term):
    name: str
    loc: Any = field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------------------
# per-class layout


class _Layout:
    __slots__ = ("names", "binder_fields", "scoped")

    def __init__(self, cls: type) -> None:
        self.names = tuple(f.name for f in dataclasses.fields(cls) if f.name != "loc")
        self.binder_fields = tuple(cls.binders)
        scoped: dict[str, tuple[str, ...]] = {}
        for binder, targets in cls.binders.items():
            for t in targets:
                scoped[t] = scoped.get(t, ()) + (binder,)
        self.scoped = scoped


_LAYOUTS: dict[type, _Layout] = {}


def _layout(cls: type) -> _Layout:
    lay = _LAYOUTS.get(cls)
    if lay is None:
        lay = _LAYOUTS[cls] = _Layout(cls)
    return lay


def children(t: Term) -> Iterator[Term]:
    """Direct sub-terms, flattening tuple-valued fields."""
    lay = _layout(type(t))
    for name in lay.names:
        if name in lay.binder_fields:
            continue
        value = getattr(t, name)
        if isinstance(value, Term):
            yield value
        elif isinstance(value, tuple):
            for item in value:
                if isinstance(item, Term):
                    yield item


def size(t: Term) -> int:
    return 1 + sum(size(c) for c in children(t))


# ---------------------------------------------------------------------------
# free variables


def free_vars(t: Term) -> frozenset[str]:
    cached = t.__dict__.get("_fv")
    if cached is not None:
        return cached
    if isinstance(t, Var):
        result = frozenset((t.name,))
    else:
        lay = _layout(type(t))
        acc: set[str] = set()
        for name in lay.names:
            if name in lay.binder_fields:
                continue
            value = getattr(t, name)
            bound = {getattr(t, b) for b in lay.scoped.get(name, ())}
            for child in _field_terms(value):
                acc |= free_vars(child) - bound
        result = frozenset(acc)
    object.__setattr__(t, "_fv", result)
    return result


def _field_terms(value: Any) -> Iterable[Term]:
    if isinstance(value, Term):
        return (value,)
    if isinstance(value, tuple):
        return [v for v in value if isinstance(v, Term)]
    return ()


def all_names(t: Term) -> set[str]:
    """Every variable name occurring in ``t``, bound or free."""
    out: set[str] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.name)
            continue
        lay = _layout(type(node))
        for b in lay.binder_fields:
            name = getattr(node, b)
            if isinstance(name, str):
                out.add(name)
        stack.extend(children(node))
    return out


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """``base`` primed until it is not in ``avoid``."""
    avoid = set(avoid)
    name = base
    while name in avoid:
        name += "'"
    return name


# ---------------------------------------------------------------------------
# substitution


def _map_field(value: Any, fn) -> Any:
    if isinstance(value, Term):
        return fn(value)
    if isinstance(value, tuple):
        changed = False
        out = []
        for item in value:
            new = fn(item) if isinstance(item, Term) else item
            changed |= new is not item
            out.append(new)
        return tuple(out) if changed else value
    return value


def subst(t: Term, x: str, replacement: Term) -> Term:
    """Capture-avoiding ``t[replacement / x]``."""
    if x not in free_vars(t):
        return t
    if isinstance(t, Var):
        return replacement
    lay = _layout(type(t))
    rfv = free_vars(replacement)
    updates: dict[str, Any] = {}
    current = {n: getattr(t, n) for n in lay.names}

    # rename binders that would capture free variables of the replacement
    for b in lay.binder_fields:
        bname = current[b]
        if not isinstance(bname, str) or bname == x or bname not in rfv:
            continue
        targets = [f for f in cls_scope(lay, b)]
        if not any(x in _fv_field(current[f]) for f in targets):
            continue
        avoid = set(rfv) | {x} | free_vars(t)
        for other in lay.binder_fields:
            if isinstance(current[other], str):
                avoid.add(current[other])
        for f in targets:
            for child in _field_terms(current[f]):
                avoid |= all_names(child)
        new = fresh_name(bname, avoid)
        for f in targets:
            current[f] = _map_field(current[f], lambda c, o=bname, n=new: subst(c, o, Var(n)))
        current[b] = new
        updates[b] = new
        for f in targets:
            updates[f] = current[f]

    for name in lay.names:
        if name in lay.binder_fields:
            continue
        bound = {current[b] for b in lay.scoped.get(name, ())}
        if x in bound:
            continue
        new_value = _map_field(current[name], lambda c: subst(c, x, replacement))
        if new_value is not current[name]:
            updates[name] = new_value
    if not updates:
        return t
    return dataclasses.replace(t, **updates)


def cls_scope(lay: _Layout, binder: str) -> tuple[str, ...]:
    return tuple(f for f, bs in lay.scoped.items() if binder in bs)


def _fv_field(value: Any) -> frozenset[str]:
    acc: frozenset[str] = frozenset()
    for child in _field_terms(value):
        acc |= free_vars(child)
    return acc


def subst_many(t: Term, mapping: dict[str, Term]) -> Term:
    """Sequential substitution; callers pass closed replacements."""
    for x, r in mapping.items():
        t = subst(t, x, r)
    return t


def rename(t: Term, old: str, new: str) -> Term:
    return subst(t, old, Var(new))


# ---------------------------------------------------------------------------
# alpha-canonical keys

_INTERN: dict[tuple, int] = {}
_counter = itertools.count()


def _intern(key: tuple) -> int:
    found = _INTERN.get(key)
    if found is None:
        found = _INTERN.setdefault(key, next(_counter))
    return found


def alpha_key(t: Term) -> int:
    """An integer identifying ``t`` up to renaming of bound variables.

    Keys of closed sub-terms are cached on the node, so shared structure
    is keyed once.
    """
    return _key(t, {}, 0)


def _key(t: Term, env: dict[str, int], depth: int) -> int:
    closed = not free_vars(t)
    if closed:
        cached = t.__dict__.get("_akey")
        if cached is not None:
            return cached
    if isinstance(t, Var):
        level = env.get(t.name)
        k = _intern(("#", depth - level) if level is not None else ("$", t.name))
    else:
        lay = _layout(type(t))
        parts: list[Any] = [type(t).__name__]
        for name in lay.names:
            if name in lay.binder_fields:
                continue
            value = getattr(t, name)
            scoped = lay.scoped.get(name, ())
            if scoped:
                inner = dict(env)
                d = depth
                for b in scoped:
                    bname = getattr(t, b)
                    d += 1
                    if isinstance(bname, str):
                        inner[bname] = d
                parts.append(_key_value(value, inner, d))
            else:
                parts.append(_key_value(value, env, depth))
        k = _intern(tuple(parts))
    if closed:
        object.__setattr__(t, "_akey", k)
    return k


def _key_value(value: Any, env: dict[str, int], depth: int) -> Any:
    if isinstance(value, Term):
        return _key(value, env, depth)
    if isinstance(value, tuple):
        return tuple(_key_value(v, env, depth) for v in value)
    return value


def alpha_eq(a: Term, b: Term) -> bool:
    return alpha_key(a) == alpha_key(b)
