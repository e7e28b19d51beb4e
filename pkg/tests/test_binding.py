from effectree import effects as E
from effectree import lambda_y as L
from effectree.binding import Var, all_names, alpha_eq, fresh_name, free_vars, rename, size, subst, subst_many

x, y, z = Var("x"), Var("y"), Var("z")


def test_free_vars_respect_every_binder():
    assert free_vars(L.Lam("x", L.O, L.App(x, y))) == {"y"}
    assert free_vars(E.Let("x", E.Return(x), E.Return(x))) == {"x"}
    assert free_vars(E.Op("Flip", E.Const("()"), "b", E.Return(Var("b")))) == frozenset()
    h = E.Handler("r", E.Return(Var("r")), (E.Clause("σ", "p", "k", E.App(Var("k"), Var("p"))),))
    assert free_vars(E.Handle(h, E.Return(z))) == {"z"}


def test_subst_avoids_capture_in_effect_binders():
    t = E.Let("y", E.Return(E.Const("()")), E.Return(E.Lam("u", E.UnitT, E.App(x, y))))
    out = subst(t, "x", y)
    assert out.var != "y" and free_vars(out) == {"y"}


def test_subst_many_with_closed_replacements():
    a, b = L.Const("a"), L.Const("b")
    assert subst_many(L.App(x, L.Lam("y", L.O, y)), {"x": a, "y": b}) == L.App(a, L.Lam("y", L.O, y))


def test_rename_and_alpha():
    a = L.Lam("x", L.O, L.App(x, z))
    assert alpha_eq(a, L.Lam("w", L.O, L.App(Var("w"), z)))
    assert not alpha_eq(a, L.Lam("w", L.O, L.App(Var("w"), y)))
    assert rename(L.App(z, a), "z", "q") == L.App(Var("q"), L.Lam("x", L.O, L.App(x, Var("q"))))


def test_fresh_name_and_size():
    assert fresh_name("x", {"x", "x1"}) not in {"x", "x1"}
    assert all_names(L.Lam("x", L.O, y)) == {"x", "y"}
    assert size(L.App(x, y)) == 3
