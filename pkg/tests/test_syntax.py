import pytest
from hypothesis import given, settings, strategies as st

from effectree import effects as E
from effectree import lambda_y as L
from effectree import randprog as R
from effectree import syntax as S
from effectree.errors import DuplicateDeclaration, ParseError

from conftest import PROGRAMS

CORPUS = sorted(p for p in PROGRAMS.rglob("*") if p.suffix in (".ly", ".effpcf"))


def test_unit_return():
    sig = E.EffectSignature({}, {})
    assert S.parse_term("(return ())", sig) == E.Return(E.Const("()"))


def test_parse_error_has_offset():
    with pytest.raises(ParseError) as err:
        S.parse("(sig (a 0))\n(term (lam x", "lambda-y")
    assert err.value.offset is not None and err.value.line == 2


def test_duplicate_declaration():
    with pytest.raises(DuplicateDeclaration):
        S.parse("(op Flip Unit 2)\n(op Flip Unit 2)\n(term (return ()))")
    with pytest.raises(DuplicateDeclaration):
        S.parse("(sig (a 0) (a 0))\n(term a)", "lambda-y")


def test_product_declaration_enumerates_pairs():
    src = S.parse("(base Loc r q)\n(base Bool tt ff)\n(product LB Loc Bool)\n(op Set LB 1)\n(term (return ()))")
    assert src.signature.bases["LB"] == ("r.tt", "r.ff", "q.tt", "q.ff")


def test_multi_argument_lambda_is_curried():
    sig = E.EffectSignature({}, {})
    t = S.parse_term("(lam (x 2) (y 2) (xor x y))", sig)
    assert isinstance(t, E.Lam) and isinstance(t.body, E.Return) and isinstance(t.body.value, E.Lam)
    assert E.typecheck_epcf(sig, {}, t) == E.fun(E.Enum(2), E.Enum(2), E.Enum(2))


def test_type_printing():
    t = L.arrows(L.arrows(L.O, L.O), L.O, L.O)
    assert S.parse_type("(-> (-> o o) o o)", calculus="lambda-y") == t
    assert S.parse_type(S.show_type(t), calculus="lambda-y") == t


def _emit(src):
    if src.calculus == "lambda-y":
        return S.emit_lambda_y(src.signature, src.term)
    return S.emit_effect(src.calculus, src.signature, src.term, src.row)


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_corpus_round_trip(path):
    src = S.parse_file(path)
    again = S.parse(_emit(src))
    assert again.calculus == src.calculus
    assert again.term == src.term
    assert again.row == src.row


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_random_program_round_trip(seed):
    (c,) = R.random_programs(seed, 1)
    assert S.parse_term(S.show(c), R.SIGNATURE) == c
