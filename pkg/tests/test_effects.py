import pytest
from hypothesis import given, settings, strategies as st

from effectree import effects as E
from effectree import randprog as R
from effectree import syntax as S
from effectree.binding import Var, alpha_eq
from effectree.errors import ArityMismatch, EffectEscape, TypeCheckError, UnhandledOperation, UnknownOperation
from effectree.trees import BOTTOM_LEAF, leaf, node, prefix

FLIP = E.EffectSignature({}, {"Flip": (E.UNIT, 2)})
SIGMA = E.EffectSignature({}, {"σ": (E.UNIT, 2), "τ": (E.UNIT, 1)})
ZERO, ONE = leaf("return((num 0 2))"), leaf("return((num 1 2))")
U = leaf("()")


def parse(text, sig=FLIP, mode="epcf"):
    return S.parse_term(text, sig, mode)


def ty(text, sig=FLIP, mode="epcf", row=None):
    return E.typecheck(sig, {}, parse(text, sig, mode), mode, row)


FLIP_XOR = "(let x (op-call Flip () (y (return y))) (xor x x))"


def test_epcf_typing_examples():
    assert ty("(return ())") == E.UnitT
    assert ty("(op-call Flip () (y (return y)))") == E.Enum(2)
    assert ty(FLIP_XOR) == E.Enum(2)


def test_epcf_typing_errors():
    with pytest.raises(UnknownOperation):
        ty("(op-call Foo () (y (return y)))")
    with pytest.raises(ArityMismatch):
        ty("(case (num 0 2) (return ()))")
    with pytest.raises(TypeCheckError):
        ty("(app (lam (x Unit) (return x)) (num 0 2))")
    with pytest.raises(TypeCheckError):
        ty("(handle (handler (return x (return x)) (Flip p r (app r p))) (return ()))")


def test_operation_percolates_out_of_let():
    out = E.step(parse(FLIP_XOR), FLIP)
    assert isinstance(out, E.Stepped)
    expected = parse("(op-call Flip () (y (let x (return y) (xor x x))))")
    assert alpha_eq(out.comp, expected)


def test_let_return_and_fix_steps():
    out = E.step(parse("(let x (return (num 1 2)) (return x))"), FLIP)
    assert out.comp == parse("(return (num 1 2))")
    fix = parse("(fix f (-> Unit 2) (lam (u Unit) (app f u)))")
    out = E.step(E.App(fix, E.Const("()")), FLIP)
    assert alpha_eq(out.comp, E.App(E.Lam("u", E.UnitT, E.App(fix, Var("u"))), E.Const("()")))


def test_effect_tree_examples():
    assert prefix(E.EffectTreeGenerator(parse(FLIP_XOR), FLIP), 2) == node("Flip", U, ZERO, ZERO)
    assert prefix(E.EffectTreeGenerator(parse("(return (num 1 2))"), FLIP), 3) == ONE
    loop = parse("(app (fix f (-> Unit 2) (lam (u Unit) (app f u))) ())")
    assert prefix(E.EffectTreeGenerator(loop, FLIP), 3) == BOTTOM_LEAF


def test_effect_tree_of_the_g_f_example():
    sig = E.EffectSignature({}, {"σg": (E.UNIT, 2), "σf": (E.UNIT, 1)})
    c = parse("(app (fix F (-> (-> Unit Unit) Unit) (lam (x (-> Unit Unit))"
              "  (op-call σg () (n (case n (app x ()) (app F (lam (z Unit) (op-call σf () (_ (app x ())))))))))) "
              " (lam (z Unit) (return ())))", sig)
    assert E.typecheck_epcf(sig, {}, c) == E.UnitT
    r = leaf("return(())")
    t = prefix(E.EffectTreeGenerator(c, sig), 5)
    assert t.label == "σg" and t.children[1] == r
    inner = t.children[2]
    assert inner.label == "σg" and inner.children[1] == node("σf", U, r)
    assert inner.children[2].children[1].label == "σf"


def test_arity_zero_operation_has_only_the_parameter():
    sig = E.EffectSignature({}, {"Raise": (E.UNIT, 0)})
    c = parse("(op-call Raise ())", sig)
    assert prefix(E.EffectTreeGenerator(c, sig), 3) == node("Raise", U)


# -- handlers

SIGMA_COMP = "(op-call σ () (y (return y)))"
DEEP = "(handler (return x (return x)) (σ p r (app r (num 0 2))) (τ p r (app r (num 0 1))))"


def test_handler_removes_handled_operations():
    assert ty(f"(handle {DEEP} {SIGMA_COMP})", SIGMA, "hepcf", ()) == E.Enum(2)
    with pytest.raises(EffectEscape):
        ty(SIGMA_COMP, SIGMA, "hepcf", ("τ",))
    with pytest.raises(UnhandledOperation):
        ty(f"(handle (handler (return x (return x)) (row σ τ) (σ p r (app r (num 0 2)))) {SIGMA_COMP})",
           SIGMA, "hepcf", ())


def test_handle_return_rule():
    c = parse(f"(handle {DEEP} (return (num 1 2)))", SIGMA, "hepcf")
    assert E.step(c, SIGMA).comp == parse("(return (num 1 2))", SIGMA, "hepcf")


def test_deep_shallow_and_generic_op_rules():
    k = parse("(return y)", SIGMA, "hepcf")
    deep = parse(f"(handle (handler (return x (return x)) (σ p r (app r (num 1 2)))) {SIGMA_COMP})", SIGMA, "hepcf")
    out = E.step(deep, SIGMA).comp
    assert isinstance(out, E.App) and isinstance(out.fun, E.Lam)
    assert out.fun.body == E.Handle(deep.handler, k) and out.arg == E.Num(1, 2)

    shallow = parse(f"(shallow-handle (handler (return x (return x)) (σ p r (app r (num 1 2)))) {SIGMA_COMP})",
                    SIGMA, "hepcf")
    out = E.step(shallow, SIGMA).comp
    assert out.fun.body == k

    generic = parse(f"(handle (handler (σ p (return (num 0 2)))) {SIGMA_COMP})", SIGMA, "gepcf")
    out = E.step(generic, SIGMA).comp
    assert out == E.Let("y", E.Return(E.Num(0, 2)), E.Handle(generic.handler, k))


def test_generic_clause_cannot_mention_a_continuation():
    with pytest.raises(TypeCheckError):
        ty(f"(handle {DEEP} {SIGMA_COMP})", SIGMA, "gepcf", ())


# -- properties over random programs


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_subject_reduction_and_determinism(seed):
    (c,) = R.random_programs(seed, 1)
    t = E.typecheck_epcf(R.SIGNATURE, {}, c)
    for _ in range(60):
        out = E.step(c, R.SIGNATURE)
        assert out == E.step(c, R.SIGNATURE)
        if not isinstance(out, E.Stepped):
            break
        c = out.comp
        assert E.subtype(E.typecheck_epcf(R.SIGNATURE, {}, c), t)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_normal_operations_belong_to_the_signature(seed):
    (c,) = R.random_programs(seed, 1)
    for _, lab in prefix(E.EffectTreeGenerator(c, R.SIGNATURE), 6).positions():
        assert lab in R.SIGNATURE.ops or lab.startswith("return(") or lab in R.SIGNATURE.constants() \
            or lab in ("⊥", "?")
