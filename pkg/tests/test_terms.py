import pytest

from chainunify.errors import SortError
from chainunify.terms import (
    NIL,
    App,
    Const,
    FreshSupply,
    Sort,
    Substitution,
    Var,
    bc,
    cons,
    depth,
    from_list,
    h,
    occurs,
    size,
    sort_of,
    to_list,
    variables,
    well_typed,
    xor,
)

U, V = Var("U", Sort.LIST), Var("V", Sort.LIST)
x, y = Var("x", Sort.ELEMENT), Var("y", Sort.ELEMENT)
a, b = Const("a"), Const("b")


def test_sorts_are_disjoint():
    assert sort_of(U) is Sort.LIST
    assert sort_of(x) is Sort.ELEMENT
    assert sort_of(bc(U, x)) is Sort.LIST
    assert sort_of(h(a, b)) is Sort.ELEMENT
    assert Var("U", Sort.LIST) != Var("U", Sort.ELEMENT)


def test_well_typed_rejects_swapped_arguments():
    assert well_typed(cons(a, NIL))
    assert not well_typed(App("cons", (NIL, a)))
    assert not well_typed(App("bc", (a, U)))


def test_list_round_trip():
    t = from_list([a, b])
    assert t == cons(a, cons(b, NIL))
    assert to_list(t) == [a, b]
    assert to_list(cons(a, U)) is None


def test_measures():
    t = h(h(a, x), b)
    assert depth(t) == 3
    assert size(t) == 5
    assert variables(t) == {x}
    assert occurs(x, t) and not occurs(y, t)


def test_xor_builder_flattens():
    t = xor(a, xor(b, x))
    assert isinstance(t, App) and t.op == "xor" and len(t.args) == 3


def test_substitution_respects_sorts():
    with pytest.raises(SortError):
        Substitution([(U, a)])


def test_apply_is_simultaneous():
    s = Substitution([(x, y), (y, a)])
    assert s.apply(h(x, y)) == h(y, a)


def test_resolved_is_idempotent():
    s = Substitution([(x, h(y, a)), (y, b)]).resolved()
    assert s.is_idempotent()
    assert s[x] == h(b, a)


def test_resolved_detects_cycles():
    with pytest.raises(SortError):
        Substitution([(x, h(y, a)), (y, h(x, a))]).resolved()


def test_compose_order():
    s = Substitution([(x, h(y, a))])
    t = Substitution([(y, b)])
    st = s.compose(t)
    term = h(x, y)
    assert st.apply(term) == t.apply(s.apply(term))


def test_restrict():
    s = Substitution([(x, a), (y, b)])
    assert dict(s.restrict([x])) == {x: a}


def test_fresh_supply_is_injective():
    f = FreshSupply()
    names = {f.fresh(Sort.ELEMENT, "v").name for _ in range(50)}
    assert len(names) == 50
    g = f.copy()
    assert g.fresh(Sort.LIST, "v").name not in names
