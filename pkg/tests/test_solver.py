import pytest

from chainunify.errors import InconsistentInput
from chainunify.oracle import SearchBudget, covered
from chainunify.rewrite import Theory
from chainunify.solver import SolvedForm, extract_unifier, minimize, unify, unify_terms, verify
from chainunify.syntax import parse_term
from chainunify.terms import NIL, App, Const, Substitution

from helpers import E, L, holds, problem


def show(sigma):
    from chainunify.syntax import format_term

    return {v.name: format_term(t) for v, t in sigma.items()}


def test_bc_definition_is_its_own_unifier():
    r = unify(problem("U =? bc(V, x);", "bc0", "a"))
    assert [show(s) for s in r.unifiers] == [{"U": "bc(V, x)"}]
    assert {v.name for v in r.parameters(r.unifiers[0])} == {"V", "x"}


def test_decide_nil_completes():
    r = unify(problem("U =? bc(V, x);", "bc0", "a"), mode="decide")
    assert r.unifiable
    assert show(r.unifiers[0]) == {"U": "nil", "V": "nil"}
    assert r.solved_forms[0].nil_completed


def test_decide_and_all_agree_on_failure():
    p = problem("U =? cons(a, nil); U =? bc(V, x);", "bc0", "a")
    for mode in ("all", "decide"):
        r = unify(p, mode=mode)
        assert not r.unifiable
        assert "clash" in r.reason


def test_size_conflict_reason():
    r = unify(problem("cons(a, nil) =? nil;", "bc0", "a"))
    assert not r.unifiable
    assert "Size conflict" in r.reason


def test_every_unifier_holds():
    p = problem("U =? db(V, x); U =? db(W, x);", "dbc", "b, c")
    r = unify(p)
    assert len(r.unifiers) == 3
    for s in r.unifiers:
        assert holds(s, p)


def test_minimize_drops_instances():
    p = problem("U =? bc(V, x);", "bc0", "a")
    general = Substitution([(L("U"), parse_term("bc(V, x)"))])
    special = Substitution([(L("U"), NIL), (L("V"), NIL)])
    assert minimize([special, general], p.original_variables, Theory.BC0) == [general]


def test_minimize_keeps_first_of_equivalent_pair():
    p = problem("U =? bc(V, x);", "bc0", "a")
    s = Substitution([(L("U"), parse_term("bc(V, x)"))])
    assert minimize([s, s], p.original_variables, Theory.BC0) == [s]


def test_no_minimize_keeps_more():
    p = problem("U =? db(V, x); U =? db(W, x);", "dbc", "b, c")
    assert len(unify(p, minimal=False).unifiers) >= len(unify(p).unifiers)


def test_extract_rejects_list_binding():
    p = problem("U =? bc(V, x);", "bc0", "a")
    with pytest.raises(InconsistentInput):
        extract_unifier(SolvedForm((), ()), Substitution([(L("U"), NIL)]), p)


def test_verify():
    p = problem("U =? bc(V, x);", "bc0", "a")
    assert verify(p, Substitution([(L("U"), NIL), (L("V"), NIL)]))
    assert not verify(p, Substitution([(L("U"), NIL), (L("V"), parse_term("[a]", ("a",)))]))


def test_unify_terms_accepts_theory_name():
    x = E("x")
    r = unify_terms([(App("h", (x, Const("a"))), App("h", (Const("b"), Const("a"))))], "bc0", ("a", "b"))
    assert [show(s) for s in r.unifiers] == [{"x": "b"}]


def test_bc1_xor_solution():
    r = unify_terms([(parse_term("x ^ a", ("a",)), Const("b"))], Theory.BC1, ("a", "b"))
    assert [show(s) for s in r.unifiers] == [{"x": "a ^ b"}]


def dbc_shared_chain():
    p = problem("U =? db(V, x); U =? db(W, x);", "dbc", "b, c")
    return p, Substitution(
        [
            # V and W agree on the first block and differ on the second
            (L("U"), parse_term("[g(b, c), g(b, b)]", ("b", "c"))),
            (L("V"), parse_term("[b, h(g(b, b), b)]", ("b", "c"))),
            (L("W"), parse_term("[b, b]", ("b", "c"))),
            (E("x"), Const("c")),
        ]
    )


def bc1_self_chain():
    p = problem("U =? bc(U, x);", "bc1")
    return p, Substitution([(L("U"), parse_term("[enc(0)]")), (E("x"), parse_term("enc(0)"))])


@pytest.mark.parametrize("case", [dbc_shared_chain, bc1_self_chain])
def test_missed_witnesses_are_solutions(case):
    p, ground = case()
    assert verify(p, ground)


@pytest.mark.xfail(strict=True, reason="dbc is not finitary; the output misses this solution")
def test_dbc_shared_chain_solution_is_covered():
    p, ground = dbc_shared_chain()
    assert covered(unify(p).unifiers, ground, Theory.DBC, SearchBudget(2, ("b", "c"), 2)) is True


@pytest.mark.xfail(strict=True, reason="bc1 cycles through bc admit non-nil solutions that are missed")
def test_bc1_self_chain_solution_is_covered():
    p, ground = bc1_self_chain()
    assert covered(unify(p).unifiers, ground, Theory.BC1, SearchBudget(2, ("a",), 2)) is True
