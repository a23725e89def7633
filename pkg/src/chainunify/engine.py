"""Inference rules on list equations and the don't-know search.

A state is a set of standard equations.  Don't-care rules are applied
exhaustively in tiers (variable elimination and failure checks first, the
``cons``-introducing rules last); when none applies the state is
L-reduced and a peak with two ``bc``/``db`` arcs is expanded into one child
per applicable don't-know rule.
"""

from __future__ import annotations

import enum
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .errors import BudgetExceeded
from .graph import BC, DB, PropagationGraph, Violation, nonnil, occur_check_violation
from .rewrite import Theory
from .standard import Equation, Problem, Shape
from .terms import NIL, App, Sort, Term, Var, replace, term_key


class RuleId(enum.Enum):
    L1 = "L1"
    L2 = "L2"
    L3a = "L3a"
    L3b = "L3b"
    L3c = "L3c"
    L4a = "L4a"
    L4b = "L4b"
    L5 = "L5"
    L6 = "L6"
    L7 = "L7"
    L8 = "L8"
    L9 = "L9"
    L10 = "L10"
    DB1a = "DB1a"
    DB1b = "DB1b"
    DB1c = "DB1c"
    DB2 = "DB2"
    DB3a = "DB3a"
    DB3b = "DB3b"
    DB4 = "DB4"
    DB5 = "DB5"
    DB6a = "DB6a"
    DB6b = "DB6b"
    DB7a = "DB7a"
    DB7b = "DB7b"
    DB8 = "DB8"


DONT_KNOW = {
    RuleId.L8, RuleId.L9, RuleId.L10,
    RuleId.DB6a, RuleId.DB6b, RuleId.DB7a, RuleId.DB7b, RuleId.DB8,
}


def default_branch_cap() -> int:
    return int(os.environ.get("CHAINUNIFY_MAX_BRANCHES", "10000"))


class Failure(Exception):
    """Raised inside saturation when a failure rule fires."""

    def __init__(self, rule: RuleId, message: str, violation: Violation | None = None):
        super().__init__(message)
        self.rule = rule
        self.violation = violation


@dataclass
class InferenceState:
    equations: frozenset[Equation]
    next_fresh: int = 0
    counters: Counter = field(default_factory=Counter)
    depth: int = 0

    def copy(self) -> "InferenceState":
        return InferenceState(self.equations, self.next_fresh, Counter(self.counters), self.depth)

    def fresh(self, sort: Sort, hint: str) -> Var:
        v = Var(f"{hint}#{self.next_fresh}", sort)
        self.next_fresh += 1
        return v

    def sorted_equations(self) -> list[Equation]:
        return sorted(self.equations)

    def list_equations(self) -> list[Equation]:
        return sorted(e for e in self.equations if e.is_list)

    def element_equations(self) -> list[Equation]:
        return sorted(e for e in self.equations if not e.is_list)


@dataclass
class TraceEvent:
    depth: int
    rule: RuleId
    witnesses: tuple[Equation, ...]

    def __str__(self):
        body = ", ".join(str(e) for e in self.witnesses)
        return f"{self.depth} {self.rule.value} on {{{body}}}"


@dataclass
class Step:
    rule: RuleId
    remove: tuple[Equation, ...]
    add: tuple[tuple[Var, Term], ...]
    witnesses: tuple[Equation, ...] = ()


def apply_step(state: InferenceState, step: Step) -> InferenceState:
    eqs = set(state.equations)
    for e in step.remove:
        eqs.discard(e)
    for lhs, rhs in step.add:
        if lhs != rhs:
            eqs.add(Equation(lhs, rhs))
    out = InferenceState(frozenset(eqs), state.next_fresh, state.counters, state.depth)
    out.counters = Counter(state.counters)
    out.counters[step.rule] += 1
    return out


# --- per-state view --------------------------------------------------------


class View:
    """Indexes of one state, rebuilt after every rule application."""

    def __init__(self, state: InferenceState):
        self.state = state
        self.eqs = state.sorted_equations()
        self.by_lhs: dict[Var, list[Equation]] = {}
        for e in self.eqs:
            self.by_lhs.setdefault(e.lhs, []).append(e)
        self._graph: PropagationGraph | None = None
        self._nonnil: set[Var] | None = None

    @property
    def graph(self) -> PropagationGraph:
        if self._graph is None:
            self._graph = PropagationGraph(self.eqs)
        return self._graph

    @property
    def nonnil(self) -> set[Var]:
        if self._nonnil is None:
            self._nonnil = nonnil(self.graph)
        return self._nonnil

    def of_shape(self, lhs: Var, shape: Shape) -> list[Equation]:
        return [e for e in self.by_lhs.get(lhs, ()) if e.shape is shape]

    def shaped(self, shape: Shape) -> Iterator[Equation]:
        return (e for e in self.eqs if e.shape is shape)

    def cons_of(self, v: Var) -> Equation | None:
        c = self.of_shape(v, Shape.CONS)
        return c[0] if c else None

    def has_nil(self, v: Var) -> bool:
        return bool(self.of_shape(v, Shape.NIL))


def _pairs_same_lhs(view: View, shape_a: Shape, shape_b: Shape):
    for lhs, group in view.by_lhs.items():
        first = [e for e in group if e.shape is shape_a]
        second = [e for e in group if e.shape is shape_b]
        for a in first:
            for b in second:
                if a is not b and (shape_a is not shape_b or a < b):
                    yield a, b


# --- tier 0: variable elimination and failure ------------------------------


def _l1(view: View) -> Step | None:
    for e in view.eqs:
        if e.shape not in (Shape.VAR_VAR_L, Shape.VAR_VAR_E):
            continue
        a, b = e.lhs, e.rhs
        big, small = (a, b) if term_key(b) < term_key(a) else (b, a)
        elsewhere = [o for o in view.eqs if o is not e and big in o.variables()]
        if not elsewhere and e.lhs == big:
            continue
        add = [(big, small)]
        for o in elsewhere:
            lhs = replace(o.lhs, {big: small})
            rhs = replace(o.rhs, {big: small})
            add.append((lhs, rhs))
        return Step(RuleId.L1, (e, *elsewhere), tuple(add), (e,))
    return None


def _fail_checks(view: View) -> None:
    for e in view.shaped(Shape.NIL):
        c = view.cons_of(e.lhs)
        if c is not None:
            raise Failure(RuleId.L7, f"Size conflict: {e} and {c}")
    v = occur_check_violation(view.graph)
    if v is not None:
        raise Failure(RuleId.L6, f"Occur-Check Violation: {v.describe()}", v)


# --- tier 1 ----------------------------------------------------------------


def _l2(view: View) -> Step | None:
    for a, b in _pairs_same_lhs(view, Shape.CONS, Shape.CONS):
        return Step(RuleId.L2, (a,), ((a.rhs.args[0], b.rhs.args[0]), (a.rhs.args[1], b.rhs.args[1])), (a, b))
    return None


def _chain_nil_rules(view: View, shape: Shape, r_a: RuleId, r_b: RuleId, r_c: RuleId) -> Step | None:
    label = BC if shape is Shape.BC else DB
    eqs = list(view.shaped(shape))
    for e in eqs:
        nil_u = view.of_shape(e.lhs, Shape.NIL)
        if nil_u:
            return Step(r_a, (e,), ((e.rhs.args[0], NIL),), (e, nil_u[0]))
    for e in eqs:
        nil_v = view.of_shape(e.rhs.args[0], Shape.NIL)
        if nil_v:
            return Step(r_b, (e,), ((e.lhs, NIL),), (e, nil_v[0]))
    for e in eqs:
        u, v = e.lhs, e.rhs.args[0]
        if view.graph.reaches_star(v, u, {label}):
            return Step(r_c, (e,), ((u, NIL), (v, NIL)), (e,))
    return None


def _l3(view: View) -> Step | None:
    return _chain_nil_rules(view, Shape.BC, RuleId.L3a, RuleId.L3b, RuleId.L3c)


def _db1(view: View) -> Step | None:
    return _chain_nil_rules(view, Shape.DB, RuleId.DB1a, RuleId.DB1b, RuleId.DB1c)


def _same_iv(view: View, shape: Shape, rule: RuleId) -> Step | None:
    for a, b in _pairs_same_lhs(view, shape, shape):
        if a.rhs.args[1] == b.rhs.args[1] and a.rhs.args[0] != b.rhs.args[0]:
            return Step(rule, (b,), ((b.rhs.args[0], a.rhs.args[0]),), (a, b))
    return None


def _l4a(view: View) -> Step | None:
    return _same_iv(view, Shape.BC, RuleId.L4a)


def _db2(view: View) -> Step | None:
    for a, b in _pairs_same_lhs(view, Shape.DB, Shape.DB):
        if a.rhs.args[0] == b.rhs.args[0] and a.rhs.args[1] != b.rhs.args[1] and a.lhs in view.nonnil:
            return Step(RuleId.DB2, (a,), ((a.rhs.args[1], b.rhs.args[1]),), (a, b))
    return None


# --- helpers for cons introduction -----------------------------------------


def _split(view: View, state: InferenceState, v: Var, add: list, hint: str = "") -> tuple[Var, Var]:
    """Head and tail of list variable v, reusing an existing cons equation."""
    c = view.cons_of(v)
    if c is not None:
        return c.rhs.args[0], c.rhs.args[1]
    head = state.fresh(Sort.ELEMENT, hint.lower() or "v")
    tail = state.fresh(Sort.LIST, hint or "V")
    add.append((v, App("cons", (head, tail))))
    return head, tail


# --- tier 2 / don't-know bodies --------------------------------------------


def _push_bc_bc(view: View, state: InferenceState, a: Equation, b: Equation, rule: RuleId) -> Step:
    u = a.lhs
    (v, x), (w, y) = a.rhs.args, b.rhs.args
    add: list = []
    hv, z = _split(view, state, v, add)
    c_w = view.cons_of(w)
    if c_w is not None:
        hw = c_w.rhs.args[0]
        add.append((c_w.rhs.args[1], z))
    elif w == v:
        hw = hv
    else:
        hw = state.fresh(Sort.ELEMENT, "v")
        add.append((w, App("cons", (hw, z))))
    hu, ut = _split(view, state, u, add)
    add += [(ut, App("bc", (z, hu))), (hu, App("h", (hv, x))), (hu, App("h", (hw, y)))]
    return Step(rule, (a, b), tuple(add), (a, b))


def _l4b(view: View, state: InferenceState) -> Step | None:
    for a, b in _pairs_same_lhs(view, Shape.BC, Shape.BC):
        if a.lhs in view.nonnil:
            return _push_bc_bc(view, state, a, b, RuleId.L4b)
    return None


def _push_db_db(view: View, state: InferenceState, a: Equation, b: Equation) -> Step:
    (v, x), (w, y) = a.rhs.args, b.rhs.args
    add: list = []
    hv, vt = _split(view, state, v, add)
    hw, wt = _split(view, state, w, add)
    hu, ut = _split(view, state, a.lhs, add)
    add += [
        (ut, App("db", (vt, hv))),
        (ut, App("db", (wt, hw))),
        (hu, App("g", (hv, x))),
        (hu, App("g", (hw, y))),
    ]
    return Step(RuleId.DB3a, (a, b), tuple(add), (a, b))


def _push_bc_db(view: View, state: InferenceState, a: Equation, b: Equation) -> Step:
    (v, x), (w, y) = a.rhs.args, b.rhs.args
    add: list = []
    hv, vt = _split(view, state, v, add)
    hw, wt = _split(view, state, w, add)
    hu, ut = _split(view, state, a.lhs, add)
    add += [
        (ut, App("bc", (vt, hu))),
        (ut, App("db", (wt, hw))),
        (hu, App("h", (hv, x))),
        (hw, App("h", (hu, y))),
    ]
    return Step(RuleId.DB3b, (a, b), tuple(add), (a, b))


# --- tier 3 ----------------------------------------------------------------


def _l5(view: View, state: InferenceState) -> Step | None:
    for e in view.shaped(Shape.BC):
        c = view.cons_of(e.lhs)
        if c is None:
            continue
        x, u1 = c.rhs.args
        v, z = e.rhs.args
        add: list = []
        y, v1 = _split(view, state, v, add)
        add += [(x, App("h", (y, z))), (u1, App("bc", (v1, x)))]
        return Step(RuleId.L5, (e,), tuple(add), (c, e))
    return None


def _db3a(view: View, state: InferenceState) -> Step | None:
    for a, b in _pairs_same_lhs(view, Shape.DB, Shape.DB):
        if a.lhs in view.nonnil:
            return _push_db_db(view, state, a, b)
    return None


def _db3b(view: View, state: InferenceState) -> Step | None:
    for a, b in _pairs_same_lhs(view, Shape.BC, Shape.DB):
        if a.lhs in view.nonnil:
            return _push_bc_db(view, state, a, b)
    return None


def _db4(view: View, state: InferenceState) -> Step | None:
    for e in view.shaped(Shape.DB):
        c = view.cons_of(e.lhs)
        if c is None:
            continue
        x, u1 = c.rhs.args
        v, z = e.rhs.args
        add: list = []
        y, v1 = _split(view, state, v, add)
        add += [(x, App("g", (y, z))), (u1, App("db", (v1, y)))]
        return Step(RuleId.DB4, (e,), tuple(add), (c, e))
    return None


def _db5(view: View, state: InferenceState) -> Step | None:
    g = view.graph
    for e in view.shaped(Shape.DB):
        u, (v, x) = e.lhs, e.rhs.args
        if g.reaches_plus(v, u, {BC, DB}) and not g.reaches_star(v, u, {DB}):
            return Step(RuleId.DB5, (e,), ((v, App("bc", (u, x))),), (e,))
    return None


TIER1: list[Callable[[View], Step | None]] = [_l2, _l3, _l4a, _db1, _db2]
TIER3 = [_db5, _l5, _db3a, _db3b, _db4]


def next_dont_care(state: InferenceState, theory: Theory) -> Step | None:
    """The next don't-care step, or None when the state is L-reduced.

    Raises Failure when the state is unsolvable.
    """
    view = View(state)
    step = _l1(view)
    if step is not None:
        return step
    _fail_checks(view)
    for rule in TIER1:
        step = rule(view)
        if step is not None:
            return step
    step = _l4b(view, state)
    if step is not None:
        return step
    for rule in TIER3:
        step = rule(view, state)
        if step is not None:
            return step
    return None


def saturate(
    state: InferenceState,
    theory: Theory,
    trace: list[TraceEvent] | None = None,
    max_steps: int = 100_000,
) -> InferenceState:
    for _ in range(max_steps):
        step = next_dont_care(state, theory)
        if step is None:
            return state
        if trace is not None:
            trace.append(TraceEvent(state.depth, step.rule, step.witnesses))
        state = apply_step(state, step)
    raise BudgetExceeded(f"don't-care saturation exceeded {max_steps} steps")


# --- don't-know ------------------------------------------------------------


def find_peak(state: InferenceState) -> tuple[Equation, Equation] | None:
    view = View(state)
    for lhs in sorted(view.by_lhs, key=term_key):
        arcs = [e for e in view.by_lhs[lhs] if e.shape in (Shape.BC, Shape.DB)]
        if len(arcs) >= 2:
            arcs.sort(key=lambda e: (e.shape is Shape.DB, e.key()))
            return arcs[0], arcs[1]
    return None


def expand_dont_know(state: InferenceState, peak: tuple[Equation, Equation]) -> list[tuple[Step, InferenceState]]:
    a, b = peak
    view = View(state)
    g = view.graph
    u = a.lhs
    (v, x), (w, y) = a.rhs.args, b.rhs.args
    children: list[Step] = []

    def make(rule: RuleId, remove, add) -> Step:
        return Step(rule, tuple(remove), tuple(add), (a, b))

    scratch: list[InferenceState] = []
    if a.shape is Shape.BC and b.shape is Shape.BC:
        children.append(make(RuleId.L8, (a, b), ((u, NIL), (v, NIL), (w, NIL))))
        st = state.copy()
        children.append(_push_bc_bc(view, st, a, b, RuleId.L9))
        scratch.append(st)
        children.append(make(RuleId.L10, (a,), ((v, w), (x, y))))
    elif a.shape is Shape.DB and b.shape is Shape.DB:
        children.append(make(RuleId.DB6a, (a, b), ((u, NIL), (v, NIL), (w, NIL))))
        if not g.reaches_star(v, u, {DB}):
            children.append(make(RuleId.DB7a, (a,), ((v, App("bc", (u, x))),)))
        if not g.reaches_star(w, u, {DB}):
            children.append(make(RuleId.DB7a, (b,), ((w, App("bc", (u, y))),)))
        children.append(make(RuleId.DB8, (a,), ((v, w), (x, y))))
    else:
        children.append(make(RuleId.DB6b, (a, b), ((u, NIL), (v, NIL), (w, NIL))))
        if not g.reaches_star(w, u, {DB}):
            children.append(make(RuleId.DB7b, (b,), ((w, App("bc", (u, y))),)))
    out = []
    for step in children:
        base = scratch[0] if step.rule is RuleId.L9 else state
        child = apply_step(base, step)
        child.depth = state.depth + 1
        out.append((step, child))
    return out


# --- d-solved check --------------------------------------------------------


def is_d_solved(state: InferenceState) -> bool:
    """Each list variable has at most one non-trivial equation and the list part is acyclic."""
    eqs = [e for e in state.equations if e.is_list]
    seen: set[Var] = set()
    for e in eqs:
        if e.lhs in seen:
            return False
        seen.add(e.lhs)
    succ = {e.lhs: [v for v in e.variables() if v.sort is Sort.LIST and v != e.lhs] for e in eqs}
    colour: dict[Var, int] = {}

    def dfs(n) -> bool:
        colour[n] = 1
        for m in succ.get(n, ()):
            c = colour.get(m, 0)
            if c == 1 or (c == 0 and not dfs(m)):
                return False
        colour[n] = 2
        return True

    return all(colour.get(n, 0) == 2 or dfs(n) for n in list(succ))


# --- search ----------------------------------------------------------------


@dataclass
class SearchStats:
    branches: int = 0
    leaves: int = 0
    failures: Counter = field(default_factory=Counter)
    max_push: int = 0
    first_failure: str | None = None


@dataclass
class Leaf:
    state: InferenceState
    lineage: tuple[TraceEvent, ...]


def initial_state(problem: Problem) -> InferenceState:
    return InferenceState(frozenset(problem.equations), problem.supply.last + 1)


def push_count(state: InferenceState) -> int:
    c = state.counters
    return c[RuleId.L4b] + c[RuleId.L5] + c[RuleId.L9]


def search(
    problem: Problem,
    max_branches: int | None = None,
    stats: SearchStats | None = None,
    trace: list[str] | None = None,
) -> Iterator[Leaf]:
    """Depth-first enumeration of d-solved leaves; lazily yields each one."""
    cap = default_branch_cap() if max_branches is None else max_branches
    stats = stats if stats is not None else SearchStats()
    visited: set[frozenset] = set()
    root = (initial_state(problem), (), None)
    stack: list[tuple[InferenceState, tuple[TraceEvent, ...], TraceEvent | None]] = [root]
    while stack:
        state, lineage, via = stack.pop()
        if via is not None and trace is not None:
            trace.append(str(via))
        events: list[TraceEvent] = []
        try:
            state = saturate(state, problem.theory, events)
        except Failure as f:
            if trace is not None:
                trace.extend(str(ev) for ev in events)
                trace.append(f"{state.depth} FAIL {f}")
            stats.failures[f.rule] += 1
            if stats.first_failure is None:
                stats.first_failure = str(f)
            continue
        if trace is not None:
            trace.extend(str(ev) for ev in events)
        lineage = lineage + tuple(events)
        stats.max_push = max(stats.max_push, push_count(state))
        if state.equations in visited:
            continue
        visited.add(state.equations)
        peak = find_peak(state)
        if peak is None:
            stats.leaves += 1
            if not is_d_solved(state):
                raise AssertionError("L-reduced state without peaks is not d-solved")
            yield Leaf(state, lineage)
            continue
        children = expand_dont_know(state, peak)
        stats.branches += len(children)
        if stats.branches > cap:
            raise BudgetExceeded(f"branch cap {cap} exceeded")
        for step, child in reversed(children):
            ev = TraceEvent(state.depth, step.rule, step.witnesses)
            stack.append((child, lineage + (ev,), ev))


__all__ = [
    "DONT_KNOW",
    "Failure",
    "InferenceState",
    "Leaf",
    "RuleId",
    "SearchStats",
    "Step",
    "TraceEvent",
    "View",
    "apply_step",
    "default_branch_cap",
    "expand_dont_know",
    "find_peak",
    "initial_state",
    "is_d_solved",
    "next_dont_care",
    "saturate",
    "search",
]
