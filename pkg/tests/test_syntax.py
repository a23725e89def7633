import random

import pytest

from chainunify.errors import ParseError, SignatureError, SortError
from chainunify.rewrite import Theory, normalize
from chainunify.syntax import format_problem, format_term, parse, parse_problem_file, parse_term, tokenize
from chainunify.terms import NIL, App, Const, Sort, Var

import ground

SAMPLE = """
# a comment
problem dbc {
  const a, b;
  U =? db(V, x);        # trailing comment
  W =? [a, h(a, b)];
}
"""


def test_problem_file():
    pf = parse_problem_file(SAMPLE)
    assert pf.theory is Theory.DBC
    assert pf.constants == ("a", "b")
    assert len(pf.equations) == 2
    lhs, rhs = pf.equations[1]
    assert lhs == Var("W", Sort.LIST)
    assert rhs == App("cons", (Const("a"), App("cons", (App("h", (Const("a"), Const("b"))), NIL))))


def test_case_decides_sort():
    assert parse_term("U") == Var("U", Sort.LIST)
    assert parse_term("u") == Var("u", Sort.ELEMENT)
    assert parse_term("u", ["u"]) == Const("u")


def test_xor_and_zero():
    t = parse_term("a ^ (b ^ 0)", "ab")
    assert isinstance(t, App) and t.op == "xor"


def test_fresh_names_tokenize():
    assert [t.text for t in tokenize("x#3 =? V#12")][:3] == ["x#3", "=?", "V#12"]


@pytest.mark.parametrize(
    "text, error",
    [
        ("problem dbc { U =? bc(V); }", ParseError),
        ("problem dbc { U =? foo(V, x); }", SignatureError),
        ("problem dbc { U =? x; }", SortError),
        ("problem dbc { U =? cons(V, x); }", SortError),
        ("problem nope { }", ParseError),
        ("problem dbc { U =? V }", ParseError),
        ("problem dbc { U =? V; } extra", ParseError),
        ("problem dbc { U =? $; }", ParseError),
    ],
)
def test_errors(text, error):
    with pytest.raises(error):
        parse_problem_file(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse_problem_file("problem dbc {\n  U =? bc(V x);\n}")
    assert err.value.line == 2


def test_round_trip_terms():
    rng = random.Random(1)
    for th in (Theory.BC0, Theory.BC1, Theory.DBC):
        for _ in range(200):
            t = ground.chained_list(th, rng)
            assert normalize(parse_term(format_term(t), "abc"), th) == normalize(t, th)
            n = normalize(t, th)
            assert parse_term(format_term(n), "abc") == n


def test_round_trip_problem():
    pf = parse_problem_file(SAMPLE)
    assert parse_problem_file(format_problem(pf)) == pf


def test_fold_enc():
    t = parse_term("enc(a ^ b)", "ab")
    assert format_term(t, fold_enc=True) == "h(a, b)"
    assert format_term(t) == "enc(a ^ b)"


def test_parse_gives_standard_form():
    p = parse(SAMPLE)
    assert p.theory is Theory.DBC
    assert p.constants == frozenset({"a", "b"})
