import json
import random

from hypothesis import given, settings, strategies as st

from effectree import lambda_y as L
from effectree import syntax as S
from effectree.binding import Var
from effectree.trees import (
    BOTTOM_LEAF,
    Closed,
    FunctionGenerator,
    NotClosed,
    PrefixGenerator,
    RETURN_UNIT,
    TreePrefix,
    UNKNOWN_LEAF,
    agree_up_to_unknown,
    leaf,
    node,
    prefix,
    regularize,
    relabel_in_P,
    truncate,
)

from helpers import random_ly


def example_generator(programs):
    return L.BohmGenerator(S.parse_file(programs / "example.ly").term)


def test_prefix_examples(programs):
    gen = example_generator(programs)
    assert prefix(gen, 0) == UNKNOWN_LEAF
    a = leaf("a")
    assert prefix(gen, 3) == node("g", a, node("g", node("f", UNKNOWN_LEAF), node("g", UNKNOWN_LEAF, UNKNOWN_LEAF)))
    loop = L.Y(L.Lam("F", L.O, Var("F")))
    assert prefix(L.BohmGenerator(loop), 5) == BOTTOM_LEAF


def test_relabel_examples():
    ra, rb = leaf("return(a)"), leaf("return(b)")
    assert relabel_in_P(node("or", ra, rb), {"return(a)"}) == node("or", leaf(RETURN_UNIT), BOTTOM_LEAF)
    assert relabel_in_P(ra, {"return(a)"}) == leaf(RETURN_UNIT)
    assert relabel_in_P(BOTTOM_LEAF, {"return(a)"}) == BOTTOM_LEAF
    assert relabel_in_P(UNKNOWN_LEAF, set()) == UNKNOWN_LEAF
    # parameters can be protected
    assert relabel_in_P(node("Get", leaf("l0"), ra), {"return(a)"}, keep={"l0"}) == node("Get", leaf("l0"), leaf(RETURN_UNIT))


def test_regularize_examples(programs):
    all_b = FunctionGenerator(0, lambda s: ("b", (s,)))
    r = regularize(all_b)
    assert isinstance(r, Closed) and len(r.graph.labels) == 1
    assert isinstance(regularize(example_generator(programs), 100), NotClosed)
    r = regularize(PrefixGenerator(leaf("c")))
    assert isinstance(r, Closed) and r.graph.labels == ("c",)


def test_json_shape():
    t = node("Flip", leaf("()"), BOTTOM_LEAF, UNKNOWN_LEAF)
    data = json.loads(t.dumps())
    assert data == {"label": "Flip", "children": [{"label": "()", "children": []},
                                                   {"label": "⊥", "children": []},
                                                   {"label": "?", "children": []}]}
    assert TreePrefix.from_json(data) == t


def test_agree_up_to_unknown():
    a = node("f", leaf("a"), UNKNOWN_LEAF)
    b = node("f", leaf("a"), node("g", leaf("b")))
    assert agree_up_to_unknown(a, b) == (True, None, 1)
    assert agree_up_to_unknown(a, node("f", leaf("b"), leaf("c")))[:2] == (False, (0,))


def random_machine(seed: int):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    alphabet = {"a": 2, "b": 1, "c": 0}
    table = {}
    for s in range(n):
        lab = rng.choice(list(alphabet))
        table[s] = (lab, tuple(rng.randrange(n) for _ in range(alphabet[lab])))
    return FunctionGenerator(0, table.__getitem__)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 8), st.integers(0, 6))
def test_prefix_monotone(seed, d, extra):
    gen = L.BohmGenerator(random_ly(seed), 2000)
    assert truncate(prefix(gen, d + extra), d) == prefix(gen, d)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_regular_unfolding_machines(seed):
    gen = random_machine(seed)
    r = regularize(gen)
    assert isinstance(r, Closed)
    for d in range(13):
        assert prefix(r.graph.generator(), d) == prefix(gen, d)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_regular_unfolding_lambda_y(seed):
    gen = L.BohmGenerator(random_ly(seed), 2000)
    r = regularize(gen, 200)
    if isinstance(r, Closed):
        for d in range(13):
            assert prefix(r.graph.generator(), d) == prefix(gen, d)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9), st.sets(st.sampled_from(["a", "c"])))
def test_relabel_idempotent(seed, P):
    t = prefix(random_machine(seed), 6)
    once = relabel_in_P(t, P)
    assert relabel_in_P(once, {RETURN_UNIT}) == once
