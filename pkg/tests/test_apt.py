import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from effectree import apt as A
from effectree import observations as O
from effectree.errors import AlphabetMismatch
from effectree.trees import BOTTOM_LEAF, Closed, FunctionGenerator, TreePrefix, leaf, node, prefix, regularize

q, q0, q1 = "q", "q0", "q1"


def test_eval_bformula_examples():
    assert A.eval_bformula(A.TT(), set())
    assert not A.eval_bformula(A.And(A.Atom(0, q), A.Atom(1, q)), {(0, q)})
    assert A.eval_bformula(A.Or(A.Atom(0, q0), A.Atom(1, q1)), {(1, q1)})
    assert not A.eval_bformula(A.FF(), {(0, q)})


def random_bformula(rng, depth=3):
    if depth == 0 or rng.random() < 0.3:
        r = rng.random()
        return A.Atom(rng.randrange(3), rng.choice("pqr")) if r < 0.8 else (A.TT() if r < 0.9 else A.FF())
    cls = A.And if rng.random() < 0.5 else A.Or
    return cls(random_bformula(rng, depth - 1), random_bformula(rng, depth - 1))


ATOMS = [(i, s) for i in range(3) for s in "pqr"]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9), st.sets(st.sampled_from(ATOMS)), st.sets(st.sampled_from(ATOMS)))
def test_bformula_monotone(seed, ys, extra):
    f = random_bformula(random.Random(seed))
    if A.eval_bformula(f, ys):
        assert A.eval_bformula(f, ys | extra)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_minimal_models(seed):
    f = random_bformula(random.Random(seed))
    models = A.minimal_models(f)
    for m in models:
        assert A.eval_bformula(f, m)
        assert all(not A.eval_bformula(f, m - {a}) for a in m)
    # every model contains a minimal one
    for mask in range(1 << 6):
        ys = {ATOMS[i] for i in range(6) if mask >> i & 1}
        assert A.eval_bformula(f, ys) == any(m <= ys for m in models)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_bformula_text_round_trip(seed):
    f = random_bformula(random.Random(seed))
    g = A.parse_bformula(A.show_bformula(f))
    for mask in range(1 << 6):
        ys = {ATOMS[i] for i in range(6) if mask >> i & 1}
        assert A.eval_bformula(f, ys) == A.eval_bformula(g, ys)


def test_bounded_check_examples():
    apt = O.eventually_c()
    assert isinstance(A.bounded_check(node("a", leaf("c"), leaf("c")), apt, 3), A.Accept)
    assert isinstance(A.bounded_check(leaf("c"), apt, 1), A.Accept)
    all_a = FunctionGenerator(0, lambda s: ("a", (s, s)))
    assert isinstance(A.bounded_check(all_a, apt, 2), A.Unknown)
    assert isinstance(A.bounded_check(node("b", BOTTOM_LEAF), apt, 2), A.Reject)
    with pytest.raises(AlphabetMismatch):
        A.bounded_check(leaf("z"), apt, 1)
    with pytest.raises(AlphabetMismatch):
        A.bounded_check(node("a", leaf("c")), apt, 2)


def graph(step, state):
    reg = regularize(FunctionGenerator(state, step))
    assert isinstance(reg, Closed)
    return reg.graph


def test_decide_regular_examples():
    apt = O.eventually_c()
    assert isinstance(A.decide_regular(graph(lambda s: ("a", (s, s)), 0), apt), A.Accept)
    assert isinstance(A.decide_regular(graph(lambda s: ("b", (s,)), 0), apt), A.Reject)
    assert isinstance(A.decide_regular(graph(lambda s: ("c", ()), 0), apt), A.Accept)
    # b then c is fine, b then b forever is not
    bc = graph(lambda s: {0: ("a", (1, 0)), 1: ("b", (2,)), 2: ("c", ())}[s], 0)
    assert isinstance(A.decide_regular(bc, apt), A.Accept)


def test_apt_json_round_trip(tmp_path):
    apt = O.store_safety({"r": "tt"}, ["return(())"])
    path = tmp_path / "a.json"
    path.write_text(apt.dumps())
    again = A.load_apt(path)
    assert again.to_json() == apt.to_json()
    assert json.loads(apt.dumps())["initial"] == apt.initial


def test_apt_validation():
    with pytest.raises(ValueError):
        A.Apt({"b": 1}, (q,), q, {q: 0}, {(q, "b"): A.Atom(1, q)})
    with pytest.raises(ValueError):
        A.Apt({"b": 1}, (q,), "nope", {q: 0}, {})
    with pytest.raises(AlphabetMismatch):
        A.Apt({"b": 1}, (q,), q, {q: 0}, {(q, "z"): A.TT()})


# -- parameters as branches


def test_parameter_branch_examples():
    apt = A.Apt({"σ[tt]": 1, "σ[ff]": 1, "end": 0}, (q,), q, {q: 1},
                {(q, "σ[tt]"): A.Atom(0, q), (q, "end"): A.TT()})
    ap = A.add_parameter_branch(apt, {"σ": ["tt", "ff"]})
    assert ap.alphabet["σ"] == 2
    assert isinstance(A.bounded_check(node("σ", leaf("tt"), leaf("end")), ap, 3), A.Accept)
    assert isinstance(A.bounded_check(node("σ", leaf("ff"), leaf("end")), ap, 3), A.Reject)
    free = A.Apt({"σ[tt]": 1, "σ[ff]": 1, "end": 0}, (q,), q, {q: 1},
                 {(q, "σ[tt]"): A.TT(), (q, "σ[ff]"): A.TT()})
    fp = A.add_parameter_branch(free, {"σ": ["tt", "ff"]})
    for v in ("tt", "ff"):
        assert isinstance(A.bounded_check(node("σ", leaf(v), leaf("end")), fp, 3), A.Accept)


def test_tree_p():
    t = node("A[x]", node("B[u]", leaf("c")), leaf("d"))
    assert A.tree_p(t) == node("A", leaf("x"), node("B", leaf("u"), leaf("c")), leaf("d"))


def test_parameter_branch_on_regular_trees():
    # the A_p correspondence also holds through the parity game on infinite trees
    apt = A.Apt({"σ[tt]": 1, "σ[ff]": 1}, (q0, q1), q0, {q0: 2, q1: 1},
                {(q0, "σ[tt]"): A.Atom(0, q0), (q0, "σ[ff]"): A.Atom(0, q1), (q1, "σ[ff]"): A.Atom(0, q1),
                 (q1, "σ[tt]"): A.Atom(0, q0)})
    ap = A.add_parameter_branch(apt, {"σ": ["tt", "ff"]})
    for v, expected in (("tt", A.Accept), ("ff", A.Reject)):
        g = graph(lambda s, v=v: (f"σ[{v}]", (s,)), 0)
        gp = graph(lambda s, v=v: ("σ", ("p", s)) if s == 0 else (v, ()), 0)
        assert isinstance(A.decide_regular(g, apt), expected)
        assert isinstance(A.decide_regular(gp, ap), expected)


# -- decide_regular against bounded_check


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_decide_regular_agrees_with_decisive_bounded_check(seed):
    rng = random.Random(seed)
    alphabet = {"a": 2, "b": 1, "c": 0}
    n = rng.randint(1, 5)
    table = {}
    for s in range(n):
        lab = rng.choice(list(alphabet))
        table[s] = (lab, tuple(rng.randrange(n) for _ in range(alphabet[lab])))
    gen = FunctionGenerator(0, table.__getitem__)
    states = tuple(f"p{i}" for i in range(rng.randint(1, 3)))

    def formula(k, depth=2):
        if depth == 0 or rng.random() < 0.4:
            r = rng.random()
            return A.Atom(rng.randrange(k), rng.choice(states)) if k and r < 0.7 else (A.TT() if r < 0.85 else A.FF())
        cls = A.And if rng.random() < 0.5 else A.Or
        return cls(formula(k, depth - 1), formula(k, depth - 1))

    apt = A.Apt(alphabet, states, states[0], {s: rng.randint(0, 3) for s in states},
                {(s, a): formula(k) for s in states for a, k in alphabet.items()})
    exact = A.decide_regular(regularize(gen).graph, apt)
    bounded = A.bounded_check(gen, apt, 7)
    if not isinstance(bounded, A.Unknown):
        assert type(bounded) is type(exact)


# -- observation automata

OR = {"or": 2}
R1 = leaf("return(())")


def test_must_and_may():
    must = O.must(["return(())"], OR, ["return(())"])
    may = O.may(["return(())"], OR, ["return(())"])
    assert isinstance(A.bounded_check(node("or", R1, R1), must, 3), A.Accept)
    t = node("or", R1, BOTTOM_LEAF)
    assert isinstance(A.bounded_check(t, must, 3), A.Reject)
    assert isinstance(A.bounded_check(t, may, 3), A.Accept)
    # an infinite branch: or(return, loop) with loop = or(loop, loop)
    g = graph(lambda s: ("or", ("r", "loop")) if s == "root" else
              (("or", ("loop", "loop")) if s == "loop" else ("return(())", ())), "root")
    assert isinstance(A.decide_regular(g, must), A.Reject)
    assert isinstance(A.decide_regular(g, may), A.Accept)
    spin = graph(lambda s: ("or", (s, s)), 0)
    assert isinstance(A.decide_regular(spin, may), A.Reject)


def test_store_automaton():
    apt = O.store_automaton({"r": "tt"}, ["return(())"])
    get = "Get[r]"
    raise_ = leaf("Raise[()]")
    # tt ↦ branch 1: the stored value is read in branch 1
    assert isinstance(A.bounded_check(node(get, raise_, R1), apt, 3), A.Accept)
    assert isinstance(A.bounded_check(node(get, R1, raise_), apt, 3), A.Reject)
    after_set = node("Set[r.ff]", node(get, R1, raise_))
    assert isinstance(A.bounded_check(after_set, apt, 4), A.Accept)


def test_store_safety_reads_parameters():
    apt = O.store_safety({"r": "tt"}, ["return(())"])
    raise_ = node("Raise", leaf("()"))
    assert isinstance(A.bounded_check(node("Get", leaf("r"), raise_, R1), apt, 3), A.Accept)
    assert isinstance(A.bounded_check(node("Get", leaf("r"), R1, raise_), apt, 3), A.Reject)


def test_eventually_c_uses_child_zero_for_b():
    apt = O.eventually_c()
    assert A.atoms(apt.delta[("q0", "b")]) == {(0, "q1")}
