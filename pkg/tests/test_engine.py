import random
import re

import pytest

from chainunify.engine import (
    DONT_KNOW,
    Failure,
    RuleId,
    SearchStats,
    expand_dont_know,
    find_peak,
    initial_state,
    is_d_solved,
    push_count,
    saturate,
    search,
)
from chainunify.errors import BudgetExceeded
from chainunify.generate import random_problem
from chainunify.graph import PropagationGraph
from chainunify.rewrite import Theory
from chainunify.solver import step_bound

from helpers import problem


def saturated(body, theory="dbc", consts=""):
    p = problem(body, theory, consts)
    events = []
    state = saturate(initial_state(p), p.theory, events)
    return state, [e.rule for e in events]


def eq_strings(state):
    return {str(e) for e in state.equations}


def test_rule_partition():
    assert DONT_KNOW == {RuleId[n] for n in ("L8", "L9", "L10", "DB6a", "DB6b", "DB7a", "DB7b", "DB8")}


def test_size_conflict():
    with pytest.raises(Failure) as err:
        saturated("U =? cons(v, W); U =? nil;")
    assert err.value.rule is RuleId.L7


def test_occur_check_failure():
    with pytest.raises(Failure) as err:
        saturated("U =? db(V, x); V =? cons(y, W); W =? bc(U, z);")
    assert err.value.rule is RuleId.L6
    assert "U >db V >cons W >bc U" in str(err.value)


def test_nil_propagates_through_bc():
    state, rules = saturated("U =? bc(V, x); V =? nil;", "bc0")
    assert {"U =? nil", "V =? nil"} <= eq_strings(state)
    assert RuleId.L3b in rules


def test_db_cycle_is_nil():
    state, rules = saturated("U =? db(V, y); V =? db(U, z);")
    assert eq_strings(state) == {"U =? nil", "V =? nil"}
    assert RuleId.DB1c in rules


def test_flip_db_to_bc():
    state, rules = saturated("U =? bc(V, x); V =? db(U, y);")
    assert rules == [RuleId.DB5]
    assert eq_strings(state) == {"U =? bc(V, x)", "U =? bc(V, y)"}


def test_bc_peak_children():
    p = problem("U =? bc(V, x); U =? bc(V, y);", "bc0")
    state = saturate(initial_state(p), p.theory)
    peak = find_peak(state)
    assert peak is not None
    rules = [step.rule for step, _ in expand_dont_know(state, peak)]
    assert rules == [RuleId.L8, RuleId.L9, RuleId.L10]


def test_db_peak_children():
    p = problem("U =? db(V, x); U =? db(W, y);")
    state = saturate(initial_state(p), p.theory)
    rules = [step.rule for step, _ in expand_dont_know(state, find_peak(state))]
    assert rules == [RuleId.DB6a, RuleId.DB7a, RuleId.DB7a, RuleId.DB8]


def test_mixed_peak_children():
    p = problem("U =? bc(V, x); U =? db(W, y);")
    state = saturate(initial_state(p), p.theory)
    rules = [step.rule for step, _ in expand_dont_know(state, find_peak(state))]
    assert rules == [RuleId.DB6b, RuleId.DB7b]


def leaves(body, theory="dbc", consts=""):
    return [leaf.state for leaf in search(problem(body, theory, consts))]


def test_cons_db_split_reaches_solved_form():
    (state,) = leaves("U =? db(V, y); U =? cons(x, U1); V =? cons(y, V1);")
    assert eq_strings(state) == {"U =? cons(x, U1)", "x =? g(y, y)", "U1 =? db(V1, y)", "V =? cons(y, V1)"}


def test_nil_branch_is_a_leaf():
    states = leaves("U =? cons(x, W); U =? bc(V, y); W =? bc(V2, y); x =? h(z, y); y =? a;", "bc0", "a")
    assert any({"W =? nil", "V2 =? nil"} <= eq_strings(s) for s in states)


def test_leaves_are_d_solved_with_one_arc_per_class():
    rng = random.Random(2)
    for _ in range(150):
        p = random_problem(rng.choice([Theory.BC0, Theory.DBC]), rng)
        for leaf in search(p):
            assert is_d_solved(leaf.state)
            g = PropagationGraph(leaf.state.equations)
            out = {}
            for a in g.arcs:
                out[a.src] = out.get(a.src, 0) + 1
            assert all(n <= 1 for n in out.values())


def test_push_steps_within_bound():
    rng = random.Random(4)
    for _ in range(200):
        th = rng.choice([Theory.BC0, Theory.BC1, Theory.DBC])
        p = random_problem(th, rng)
        stats = SearchStats()
        for _ in search(p, stats=stats):
            pass
        assert stats.max_push <= step_bound(p)


def test_trace_lines():
    trace = []
    list(search(problem("U =? bc(V, x); U =? bc(V, y);", "bc0"), trace=trace))
    assert trace
    pattern = re.compile(r"^\d+ (L\d+[abc]?|DB\d[abc]?) on \{.*\}$")
    assert all(pattern.match(line) or " FAIL " in line for line in trace)
    assert trace[0] == "0 L8 on {U =? bc(V, x), U =? bc(V, y)}"


def test_branch_cap():
    p = problem("U =? bc(V, x); U =? bc(W, y); W =? bc(V, z); T =? bc(V, u); T =? bc(W, w);", "bc0")
    with pytest.raises(BudgetExceeded):
        list(search(p, max_branches=2))


def test_push_count_counts_pushes():
    state, rules = saturated("U =? cons(x, W); U =? bc(V, y);", "bc0")
    assert push_count(state) == rules.count(RuleId.L5) + rules.count(RuleId.L4b) + rules.count(RuleId.L9)
    assert RuleId.L5 in rules
