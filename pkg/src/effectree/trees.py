"""Lazy infinite trees: generators, finite prefixes, relabelling and
regularisation into finite graphs.

A *generator* is any object with

* ``expand() -> (label, children)`` where ``children`` is a tuple of generators,
* ``key() -> hashable`` identifying the configuration (equal keys must expand
  to equal trees).

Depth is structural: ``prefix(g, d)`` keeps nodes at depth ``< d`` and replaces
the rest by the Unknown label.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Protocol

from effectree.lambda_y import BOTTOM, UNKNOWN

RETURN_UNIT = "return(())"
RESERVED = frozenset({BOTTOM, UNKNOWN})


class TreeGenerator(Protocol):
    def expand(self) -> tuple[str, tuple["TreeGenerator", ...]]: ...

    def key(self) -> Any: ...


@dataclass(frozen=True)
class TreePrefix:
    label: str
    children: tuple["TreePrefix", ...] = ()

    def __str__(self) -> str:
        if not self.children:
            return self.label
        return f"{self.label}({', '.join(str(c) for c in self.children)})"

    def to_json(self) -> dict:
        return {"label": self.label, "children": [c.to_json() for c in self.children]}

    @staticmethod
    def from_json(data: dict) -> "TreePrefix":
        return TreePrefix(data["label"], tuple(TreePrefix.from_json(c) for c in data.get("children", ())))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False)

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def positions(self) -> Iterator[tuple[tuple[int, ...], str]]:
        stack: list[tuple[tuple[int, ...], TreePrefix]] = [((), self)]
        while stack:
            pos, node = stack.pop()
            yield pos, node.label
            for i in reversed(range(len(node.children))):
                stack.append((pos + (i,), node.children[i]))

    def count(self, label: str) -> int:
        return sum(1 for _, lab in self.positions() if lab == label)


def leaf(label: str) -> TreePrefix:
    return TreePrefix(label, ())


def node(label: str, *children: TreePrefix) -> TreePrefix:
    return TreePrefix(label, tuple(children))


UNKNOWN_LEAF = leaf(UNKNOWN)
BOTTOM_LEAF = leaf(BOTTOM)


def prefix(gen: TreeGenerator, depth: int) -> TreePrefix:
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if depth == 0:
        return UNKNOWN_LEAF
    label, kids = gen.expand()
    return TreePrefix(label, tuple(prefix(k, depth - 1) for k in kids))


def truncate(t: TreePrefix, depth: int) -> TreePrefix:
    if depth == 0:
        return UNKNOWN_LEAF
    return TreePrefix(t.label, tuple(truncate(c, depth - 1) for c in t.children))


def relabel_in_P(t: TreePrefix, P: Iterable[str], keep: Iterable[str] = ()) -> TreePrefix:
    """Leaves in ``P`` become ``return(())``; other leaves become ⊥.

    Leaves labelled in ``keep`` (e.g. operation parameters) are untouched, as
    are Unknown leaves and internal nodes.
    """
    P = frozenset(P)
    return _relabel(t, P, frozenset(keep) | {UNKNOWN})


def _relabel(t: TreePrefix, P: frozenset, keep: frozenset) -> TreePrefix:
    if t.children:
        return TreePrefix(t.label, tuple(_relabel(c, P, keep) for c in t.children))
    if t.label in P:
        return leaf(RETURN_UNIT)
    if t.label in keep:
        return t
    return BOTTOM_LEAF


def agree_up_to_unknown(a: TreePrefix, b: TreePrefix) -> tuple[bool, tuple[int, ...] | None, int]:
    """Compare two prefixes where Unknown matches anything.

    Returns (equal, first mismatching position, number of tolerated Unknowns).
    """
    tolerated = 0
    stack: list[tuple[tuple[int, ...], TreePrefix, TreePrefix]] = [((), a, b)]
    while stack:
        pos, x, y = stack.pop()
        if x.label == UNKNOWN or y.label == UNKNOWN:
            if x.label != y.label:
                tolerated += 1
            continue
        if x.label != y.label or len(x.children) != len(y.children):
            return False, pos, tolerated
        for i in reversed(range(len(x.children))):
            stack.append((pos + (i,), x.children[i], y.children[i]))
    return True, None, tolerated


# ---------------------------------------------------------------------------
# simple generators


class PrefixGenerator:
    """Generator reading off an explicit finite tree."""

    __slots__ = ("tree",)

    def __init__(self, tree: TreePrefix) -> None:
        self.tree = tree

    def expand(self):
        return self.tree.label, tuple(PrefixGenerator(c) for c in self.tree.children)

    def key(self):
        return self.tree


class FunctionGenerator:
    """Generator from a state and a step function ``state -> (label, child states)``;
    states must be hashable."""

    __slots__ = ("state", "step")

    def __init__(self, state: Any, step) -> None:
        self.state = state
        self.step = step

    def expand(self):
        label, kids = self.step(self.state)
        return label, tuple(FunctionGenerator(k, self.step) for k in kids)

    def key(self):
        return self.state


# ---------------------------------------------------------------------------
# regular graphs


@dataclass(frozen=True)
class RegularGraph:
    root: int
    labels: tuple[str, ...]
    edges: tuple[tuple[int, ...], ...]

    @property
    def vertices(self) -> range:
        return range(len(self.labels))

    def generator(self, v: int | None = None) -> "GraphGenerator":
        return GraphGenerator(self, self.root if v is None else v)

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "vertices": [{"label": l, "children": list(e)} for l, e in zip(self.labels, self.edges)],
        }


class GraphGenerator:
    __slots__ = ("graph", "vertex")

    def __init__(self, graph: RegularGraph, vertex: int) -> None:
        self.graph = graph
        self.vertex = vertex

    def expand(self):
        g = self.graph
        return g.labels[self.vertex], tuple(GraphGenerator(g, w) for w in g.edges[self.vertex])

    def key(self):
        return (id(self.graph), self.vertex)


@dataclass(frozen=True)
class Closed:
    graph: RegularGraph


@dataclass(frozen=True)
class NotClosed:
    explored: int
    reason: str


def regularize(gen: TreeGenerator, max_states: int = 4096) -> Closed | NotClosed:
    """Breadth-first exploration of configurations, identified by ``key()``."""
    if max_states < 1:
        raise ValueError("max_states must be positive")
    ids: dict[Any, int] = {gen.key(): 0}
    labels: list[str] = []
    edges: list[tuple[int, ...]] = []
    queue: deque = deque([gen])
    while queue:
        g = queue.popleft()
        label, kids = g.expand()
        if label == UNKNOWN:
            return NotClosed(len(ids), "budget exhausted while unfolding")
        out = []
        for k in kids:
            kk = k.key()
            v = ids.get(kk)
            if v is None:
                if len(ids) >= max_states:
                    return NotClosed(len(ids), f"more than {max_states} configurations")
                v = ids[kk] = len(ids)
                queue.append(k)
            out.append(v)
        labels.append(label)
        edges.append(tuple(out))
    return Closed(RegularGraph(0, tuple(labels), tuple(edges)))
