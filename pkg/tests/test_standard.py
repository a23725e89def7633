import pytest

from chainunify.errors import SignatureError, SortError
from chainunify.oracle import SearchBudget, brute_force_unifiers
from chainunify.rewrite import Theory, equal_modulo
from chainunify.standard import Equation, Shape, classify, to_standard_form
from chainunify.syntax import parse_term
from chainunify.terms import NIL, App, Const, Substitution

from helpers import E, L, problem

U, V, W = L("U"), L("V"), L("W")
x, y = E("x"), E("y")


@pytest.mark.parametrize(
    "rhs, shape",
    [
        (V, Shape.VAR_VAR_L),
        (App("bc", (V, y)), Shape.BC),
        (App("db", (V, y)), Shape.DB),
        (App("cons", (y, V)), Shape.CONS),
        (NIL, Shape.NIL),
    ],
)
def test_list_shapes(rhs, shape):
    assert classify(U, rhs) is shape


def test_element_shapes():
    assert classify(x, y) is Shape.VAR_VAR_E
    assert classify(x, App("h", (x, y))) is Shape.H
    assert classify(x, App("g", (x, y))) is Shape.G
    assert classify(x, Const("a")) is Shape.CONST


def test_non_flat_rhs_rejected():
    with pytest.raises(ValueError):
        Equation(U, App("bc", (App("cons", (x, V)), y)))


def test_flattening_introduces_definitions():
    t = parse_term("bc([a], b)", ["a", "b"])
    p = to_standard_form([(U, t)], Theory.BC0, ["a", "b"])
    shapes = sorted(e.shape.name for e in p.equations)
    assert shapes.count("CONST") == 2
    assert "BC" in shapes and "CONS" in shapes and "NIL" in shapes
    assert all(isinstance(a, type(x)) for e in p.equations if isinstance(e.rhs, App) for a in e.rhs.args)


def test_standard_input_is_kept():
    p = problem("U =? bc(V, x); V =? cons(y, W);")
    assert {str(e) for e in p.equations} == {"U =? bc(V, x)", "V =? cons(y, W)"}


def test_standardizing_twice_changes_nothing():
    p = problem("U =? bc([a, x], h(a, y));", "bc0", "a")
    again = to_standard_form([(e.lhs, e.rhs) for e in p.equations], p.theory, p.constants)
    assert sorted(str(e) for e in again.equations) == sorted(str(e) for e in p.equations)


def test_attack_problem_flattens():
    consts = ["A", "I", "m", "v", "w"]
    lhs = parse_term("bc([I, z], w)", consts)
    rhs = parse_term("cons(h(I, w), [h(m, h(A, v))])", consts)
    p = to_standard_form([(lhs, rhs)], Theory.BC1, consts)
    for e in p.equations:
        assert e.shape in Shape


def test_sort_mismatch():
    with pytest.raises(SortError):
        to_standard_form([(U, x)], Theory.BC0)


def test_forbidden_symbol():
    with pytest.raises(SignatureError):
        to_standard_form([(x, App("g", (x, y)))], Theory.BC0)
    with pytest.raises(SignatureError):
        to_standard_form([(x, App("car", (U,)))], Theory.DBC_PLUS)


def test_standard_form_preserves_solutions():
    """Ground solutions of the flattened problem restrict to solutions of the input."""
    p = problem("U =? bc([a, x], y);", "bc0", "a")
    budget = SearchBudget(1, ("a", "b"), 2, entry_depth=3)
    sols = brute_force_unifiers(p, budget)
    assert sols
    for s in sols:
        sub = Substitution(s)
        for lhs, rhs in p.source:
            assert equal_modulo(sub.apply(lhs), sub.apply(rhs), p.theory)
