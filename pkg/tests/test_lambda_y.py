import pytest
from hypothesis import given, settings, strategies as st

from effectree import lambda_y as L
from effectree import syntax as S
from effectree.binding import Var, alpha_eq, alpha_key, free_vars, subst
from effectree.errors import TypeCheckError, UnboundVariable, UnknownConstant

from helpers import OO, SIG, random_ly

x, y, F = Var("x"), Var("y"), Var("F")
M = L.Y(L.Lam("F", OO, L.Lam("x", L.O, L.apply(L.Const("g"), x, L.App(F, L.App(L.Const("f"), x))))))
MA = L.App(M, L.Const("a"))


def test_typecheck_examples():
    assert L.typecheck_ly(L.Signature({}), {}, L.Lam("x", L.O, x)) == OO
    assert L.typecheck_ly(SIG, {}, L.Const("g")) == L.Arrow(L.O, OO)
    assert L.typecheck_ly(SIG, {}, M) == OO


def test_typecheck_errors():
    with pytest.raises(UnknownConstant):
        L.typecheck_ly(SIG, {}, L.Const("h"))
    with pytest.raises(UnboundVariable):
        L.typecheck_ly(SIG, {}, x)
    with pytest.raises(TypeCheckError):
        L.typecheck_ly(SIG, {}, L.App(L.Const("a"), L.Const("a")))
    with pytest.raises(TypeCheckError):  # Y needs T → T
        L.typecheck_ly(SIG, {}, L.Y(L.Const("a")))
    with pytest.raises(TypeCheckError):  # binders must be annotated
        L.typecheck_ly(SIG, {}, L.Lam("x", None, x))


def test_whnf_examples():
    out = L.whnf_reduce(MA)
    assert isinstance(out, L.Normal)
    assert out.whnf.name == "g"
    assert out.whnf.args[0] == L.Const("a")
    assert alpha_eq(out.whnf.args[1], L.App(M, L.App(L.Const("f"), L.Const("a"))))
    loop = L.Y(L.Lam("F", L.O, F))
    d = L.whnf_reduce(loop)
    assert isinstance(d, L.Diverged) and d.cycle_length == 2
    assert isinstance(L.whnf_reduce(L.Lam("x", L.O, x)), L.Normal)
    assert isinstance(L.whnf_reduce(L.Lam("x", L.O, x)).whnf, L.LamHead)


def test_diverged_witness_reproduces_cycle():
    loop = L.Y(L.Lam("F", L.O, F))
    d = L.whnf_reduce(loop)
    t = d.witness
    for _ in range(d.cycle_length):
        t = L.whnf_step(t)
    assert alpha_eq(t, d.witness)


def test_budget_exceeded():
    # Y (λF. λx. F (f x)) a never repeats a configuration
    grow = L.App(L.Y(L.Lam("F", OO, L.Lam("x", L.O, L.App(F, L.App(L.Const("f"), x))))), L.Const("a"))
    assert isinstance(L.whnf_reduce(grow, 50), L.BudgetExceeded)
    assert isinstance(L.bohm_node(grow, 50), L.BottomUnknown)


def test_subst_examples():
    a = L.Const("a")
    assert subst(x, "x", a) == a
    assert subst(L.Lam("x", L.O, x), "x", a) == L.Lam("x", L.O, x)
    out = subst(L.Lam("y", L.O, L.App(x, y)), "x", y)
    assert isinstance(out, L.Lam) and out.var != "y"
    assert out.body == L.App(y, Var(out.var))


def test_bohm_node_examples():
    n = L.bohm_node(MA)
    assert n.name == "g" and len(n.children) == 2
    assert L.bohm_node(L.Y(L.Lam("F", L.O, F))) == L.Bottom()
    assert L.bohm_node(L.Const("a")) == L.Node("a", ())
    with pytest.raises(ValueError):
        L.bohm_node(x)


def test_parse_example_term():
    text = "(app (Y (lam (F (-> o o)) (lam (x o) (app (app g x) (app F (app f x)))))) a)"
    assert S.parse_term(text, SIG, "lambda-y") == MA


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_subject_reduction(seed):
    t = random_ly(seed)
    assert L.typecheck_ly(SIG, {}, t) == L.O
    for _ in range(20):
        t = L.whnf_step(t)
        if t is None:
            break
        assert L.typecheck_ly(SIG, {}, t) == L.O


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_whnf_of_ground_term_is_saturated(seed):
    out = L.whnf_reduce(random_ly(seed), 2000)
    if isinstance(out, L.Normal):
        h = out.whnf
        assert isinstance(h, L.ConstHead) and len(h.args) == SIG.arity(h.name)
        assert all(L.typecheck_ly(SIG, {}, a) == L.O for a in h.args)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 10**9))
def test_substitution_lemma(seed, seed2):
    m = random_ly(seed, L.O, {"z": OO})
    n = random_ly(seed2, OO, prefix="w")
    assert L.typecheck_ly(SIG, {}, subst(m, "z", n)) == L.typecheck_ly(SIG, {"z": OO}, m)
    assert "z" not in free_vars(subst(m, "z", n))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_alpha_key_ignores_binder_names(seed):
    a, b = random_ly(seed, prefix="v"), random_ly(seed, prefix="u")
    assert alpha_eq(a, b) and alpha_key(a) == alpha_key(b)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_ly_print_parse_round_trip(seed):
    t = random_ly(seed)
    assert S.parse_term(S.show(t), SIG, "lambda-y") == t
