import pytest

from regtype.domain import (
    BOTTOM,
    AbstractSub,
    DomainError,
    SolveError,
    amgu,
    asub_glb,
    asub_leq,
    asub_lub,
    solve,
    term_to_type,
    unify_terms,
)
from regtype.grammar import ANY_TYPE, NUM_TYPE, member, parse_grammar
from regtype.structural import Label, NameRegistry, TypeDescriptor
from regtype.terms import CONS, Number, Step, Struct, Var, atom, mklist

G = parse_grammar
X, Y, Z, N, L, Xs = (Var(n) for n in ["X", "Y", "Z", "N", "L", "Xs"])
TL = G("Tl -> [] | .(num,Tl)")


def test_asub_order_and_lub():
    a = AbstractSub({X: NUM_TYPE})
    assert asub_leq(BOTTOM, a)
    assert asub_leq(a, AbstractSub({X: ANY_TYPE}))
    assert not asub_leq(AbstractSub({X: ANY_TYPE}), BOTTOM)
    assert asub_lub(BOTTOM, a) == a
    assert asub_glb(a, BOTTOM).is_bottom
    lub = asub_lub(AbstractSub({X: G("T -> []")}), AbstractSub({X: G("T -> .(num,[])")}))
    assert lub[X] == G("T1 -> [] | .(num,[])")


def test_bottom_entry_collapses():
    assert AbstractSub({X: NUM_TYPE, Y: G("$bot")}).is_bottom
    assert asub_glb(AbstractSub({X: NUM_TYPE}), AbstractSub({X: G("T -> []")})).is_bottom


def test_variable_mismatch():
    with pytest.raises(DomainError):
        asub_lub(AbstractSub({X: NUM_TYPE}), AbstractSub({Y: NUM_TYPE}))


def test_term_to_type():
    t = term_to_type(Struct(".", (Y, L)), AbstractSub({Y: NUM_TYPE, L: TL}))
    assert t == G("T -> .(num,Tl); Tl -> [] | .(num,Tl)")
    assert member(mklist([Number(3)]), t)
    fab = Struct("f", (atom("a"), atom("b")))
    assert term_to_type(fab, AbstractSub({})) == G("T -> f(a,b)")
    assert term_to_type(X, AbstractSub({X: NUM_TYPE})) == NUM_TYPE
    with pytest.raises(DomainError):
        term_to_type(X, AbstractSub({}))


def test_solve():
    eqs = dict(solve(Struct(".", (Y, L)), G("T -> .(num,Tl); Tl -> [] | .(num,Tl)")))
    assert eqs == {Y: NUM_TYPE, L: TL}
    assert dict(solve(X, TL)) == {X: TL}
    assert dict(solve(Struct("f", (X, X)), G("T -> f(a,Ab); Ab -> a | b"))) == {X: G("T -> a")}
    assert dict(solve(Struct("f", (X, Struct("g", (Y,)))), ANY_TYPE)) == {X: ANY_TYPE, Y: ANY_TYPE}
    with pytest.raises(SolveError):
        solve(Struct("g", (X,)), G("T -> f(a)"))


def test_amgu_examples():
    a = AbstractSub({X: ANY_TYPE, N: NUM_TYPE, Xs: G("T0 -> []")})
    out = amgu(a, X, Struct(".", (N, Xs)))
    assert out == AbstractSub({X: G("T -> .(num,[])"), N: NUM_TYPE, Xs: G("T -> []")})

    assert amgu(AbstractSub({X: NUM_TYPE}), X, atom("a")).is_bottom

    a = AbstractSub({X: G("T -> f(a,b)"), Y: ANY_TYPE, Z: ANY_TYPE})
    out = amgu(a, X, Struct("f", (Y, Z)))
    assert (out[X], out[Y], out[Z]) == (G("T -> f(a,b)"), G("T -> a"), G("T -> b"))


def test_amgu_never_grows_x():
    a = AbstractSub({X: TL, Y: ANY_TYPE})
    out = amgu(a, X, Struct(".", (Y, atom("[]"))))
    assert out[X] == G("T -> .(num,[])")
    assert out[Y] == NUM_TYPE


def test_amgu_missing_variable():
    with pytest.raises(DomainError):
        amgu(AbstractSub({X: ANY_TYPE}), X, Y)


def test_unify_terms_both_sides():
    a = AbstractSub({X: NUM_TYPE, Y: ANY_TYPE})
    out = unify_terms(a, Struct("f", (X, atom("a"))), Struct("f", (Number(1), Y)))
    assert out[Y] == G("T -> a")
    assert unify_terms(a, Struct("f", (X,)), Struct("g", (Y,))).is_bottom


def test_amgu_labels_in_structural_mode():
    reg = NameRegistry()
    nx, ny, nl = reg.fresh_name("x"), reg.fresh_name("y"), reg.fresh_name("l")
    a = AbstractSub(
        {
            X: TypeDescriptor(nx, frozenset(), ANY_TYPE),
            Y: TypeDescriptor(ny, frozenset(), NUM_TYPE),
            L: TypeDescriptor(nl, frozenset(), TL),
        }
    )
    out = amgu(a, X, Struct(".", (Y, L)))
    dx = out[X]
    assert dx.ty == G("T -> .(num,Tl); Tl -> [] | .(num,Tl)")
    assert dx.labels == frozenset({Label((Step(CONS, 1),), ny), Label((Step(CONS, 2),), nl)})
    assert out[Y].name is ny and out[L].name is nl
