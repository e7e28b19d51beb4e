from hypothesis import given, settings, strategies as st

from effectree import cps
from effectree import effects as E
from effectree import lambda_y as L
from effectree import randprog as R
from effectree import syntax as S
from effectree.binding import Var, alpha_eq
from effectree.trees import leaf, node

BOOL = E.EffectSignature({"B": ("t", "f")}, {"Flip": (E.UNIT, 2)})
FLIP_XOR = S.parse_term("(let x (op-call Flip () (y (return y))) (xor x x))", BOOL)


def test_cps_types():
    assert cps.cps_type(E.Base("B")) == L.O
    assert cps.cps_type(E.Enum(2)) == L.arrows(L.O, L.O, L.O)
    assert cps.cps_type(E.fun(E.UnitT, E.UnitT)) == L.arrows(L.O, L.arrows(L.O, L.O), L.O)


def test_cps_term_clauses():
    ret = cps.cps_translate(BOOL, E.Return(E.Const("t")))
    assert isinstance(ret, L.Lam) and ret.body == L.App(Var(ret.var), L.Const("t"))
    num = cps.cps_translate(BOOL, E.Num(1, 3))
    assert alpha_eq(num, L.lams([("a", L.O), ("b", L.O), ("c", L.O)], Var("b")))
    fix = S.parse_term("(fix f (-> Unit Unit) (lam (u Unit) (app f u)))", BOOL)
    assert isinstance(cps.cps_translate(BOOL, fix), L.Y)


def test_operation_clause_has_one_branch_per_result():
    c = cps.cps_translate(BOOL, S.parse_term("(op-call Flip () (y (return y)))", BOOL))
    # λc. Flip () (…) (…)
    head, args = L.spine(c.body)
    assert head == L.Const("Flip") and len(args) == 3 and args[0] == L.Const("()")


def test_simulation_examples():
    r = cps.simulation_check(BOOL, E.Return(E.Const("t")), cps.identity_continuation(), 1)
    assert r.equal and r.cps_tree == leaf("t")
    r = cps.simulation_check(BOOL, FLIP_XOR, None, 3)
    assert r.equal and r.cps_tree == node("Flip", leaf("()"), leaf("K0"), leaf("K0"))
    loop = S.parse_term("(app (fix f (-> Unit 2) (lam (u Unit) (app f u))) ())", BOOL)
    r = cps.simulation_check(BOOL, loop, None, 1)
    assert r.equal


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_typing_lemma(seed):
    (c,) = R.random_programs(seed, 1)
    # cps_translate asserts C* : ¬¬U* by re-typechecking
    out = cps.cps_translate(R.SIGNATURE, c)
    t = E.typecheck_epcf(R.SIGNATURE, {}, c)
    assert L.typecheck_ly(cps.cps_signature(R.SIGNATURE), {}, out) == L.neg(L.neg(cps.cps_type(t)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_simulation_on_random_programs(seed):
    (c,) = R.random_programs(seed, 1)
    assert cps.simulation_check(R.SIGNATURE, c, None, 6).equal


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_step_simulation_on_random_steps(seed):
    for before, after in R.random_steps(seed, 3):
        # known gap: the step lowers a let-bound type to a Never-containing subtype
        assert cps.check_step_simulation(R.SIGNATURE, before, after).relaxed or R.lowers_let_type(R.SIGNATURE, before, after)


def _unfolds_fix(before, after) -> bool:
    return S.show(before).count("(fix ") > S.show(after).count("(fix ")


def test_top_level_percolation_is_within_two_administrative_steps():
    before = S.parse_term("(let y (op-call Flip () (b (return b))) (return y))", R.SIGNATURE)
    out = E.step(before, R.SIGNATURE)
    assert cps.check_step_simulation(R.SIGNATURE, before, out.comp).strict


def test_nested_percolation_needs_a_leading_continuation_step():
    # one more let around the percolating operation costs one more root β-step
    before = S.parse_term("(let y1 (let y2 (op-call Flip () (b3 (return (num 0 2))))"
                          " (op-call Flip () (b4 (return (lam (x5 2) (return b4)))))) (return (num 0 2)))",
                          R.SIGNATURE)
    out = E.step(before, R.SIGNATURE)
    check = cps.check_step_simulation(R.SIGNATURE, before, out.comp)
    assert not check.strict and check.relaxed


def test_unfolding_a_fix_with_a_never_body_changes_the_coercions():
    # the reduct is typed Never where the redex had the annotated type 2, so the
    # let binder and the coercion wrappers differ between the two translations
    before = S.parse_term("(let y (app (fix g (-> Unit 2) (lam (u Unit) (op-call Raise ()))) ())"
                          " (op-call Get l1 (b (return b))))", R.SIGNATURE)
    out = E.step(before, R.SIGNATURE)
    assert _unfolds_fix(before, out.comp) and R.lowers_let_type(R.SIGNATURE, before, out.comp)
    assert not cps.check_step_simulation(R.SIGNATURE, before, out.comp).relaxed
