"""Random problem generators for property tests and benchmarks."""

from __future__ import annotations

import random
from typing import Callable, Mapping

from .rewrite import Theory, normalize
from .standard import Equation, Problem, problem_from_equations, to_standard_form
from .terms import NIL, ZERO, App, Const, Sort, Term, Var, from_list

LIST_NAMES = ["U", "V", "W", "X", "Y", "Z"]
ELEM_NAMES = ["x", "y", "z", "u", "v", "w"]


def random_problem(
    theory: Theory,
    rng: random.Random,
    max_vars: int = 6,
    max_equations: int = 4,
    constants: tuple[str, ...] = ("a", "b"),
) -> Problem:
    """A random problem already in standard form, over at most max_vars variables."""
    n_list = rng.randint(2, min(3, max_vars - 1))
    n_elem = rng.randint(1, max_vars - n_list)
    lv = [Var(n, Sort.LIST) for n in LIST_NAMES[:n_list]]
    ev = [Var(n, Sort.ELEMENT) for n in ELEM_NAMES[:n_elem]]
    consts = [Const(c) for c in constants]
    list_shapes = ["bc", "bc", "cons", "cons", "nil", "var"]
    elem_shapes = ["h", "const", "var"]
    if theory.is_dbc:
        list_shapes += ["db", "db"]
        elem_shapes += ["g", "g"]
    if theory is Theory.BC1:
        elem_shapes += ["xor"]
    def other(v: Var) -> Var:
        rest = [w for w in lv if w != v]
        return rng.choice(rest) if rest and rng.random() < 0.85 else v

    eqs: list[Equation] = []
    for _ in range(rng.randint(1, max_equations)):
        if rng.random() < 0.65:
            lhs = rng.choice(lv)
            kind = rng.choice(list_shapes)
            if kind in ("bc", "db"):
                rhs = App(kind, (other(lhs), rng.choice(ev)))
            elif kind == "cons":
                rhs = App("cons", (rng.choice(ev), other(lhs)))
            elif kind == "nil":
                rhs = NIL
            else:
                rhs = other(lhs)
        else:
            lhs = rng.choice(ev)
            kind = rng.choice(elem_shapes)
            if kind in ("h", "g"):
                rhs = App(kind, (rng.choice(ev), rng.choice(ev)))
            elif kind == "const":
                rhs = rng.choice(consts)
            elif kind == "xor":
                rhs = App("xor", tuple(sorted(rng.sample(ev, min(2, len(ev))))))
                if len(rhs.args) < 2:
                    rhs = rng.choice(consts)
            else:
                rhs = rng.choice(ev)
        if lhs == rhs:
            continue
        eqs.append(Equation(lhs, rhs))
    if not eqs:
        eqs.append(Equation(lv[0], App("cons", (ev[0], lv[0] if len(lv) == 1 else lv[1]))))
    return problem_from_equations(eqs, theory)


def random_ground(theory: Theory, rng: random.Random, sort: Sort, constants=("a", "b"), depth: int = 2) -> Term:
    """A random ground normal form; lists have at most two entries."""
    if sort is Sort.LIST:
        items = [random_ground(theory, rng, Sort.ELEMENT, constants, depth) for _ in range(rng.randint(0, 2))]
        return normalize(from_list(items), theory)
    leaves: list[Term] = [Const(c) for c in constants] + ([ZERO] if theory is Theory.BC1 else [])
    if depth <= 1 or rng.random() < 0.5:
        return rng.choice(leaves)
    op = rng.choice(["h", "g"] if theory.is_dbc else ["h"])
    args = (
        random_ground(theory, rng, Sort.ELEMENT, constants, depth - 1),
        random_ground(theory, rng, Sort.ELEMENT, constants, depth - 1),
    )
    return normalize(App(op, args), theory)


def anchored_problem(
    theory: Theory,
    rng: random.Random,
    max_vars: int = 4,
    max_equations: int = 3,
    constants: tuple[str, ...] = ("a", "b"),
    witness: Callable[[Problem], Mapping[Var, Term] | None] | None = None,
) -> Problem:
    """A random problem with one or two variables pinned to ground values.

    Pinning keeps the set of ground solutions small enough to enumerate.
    Pinned values come from ``witness(core)`` when it returns a solution,
    so the result stays solvable; otherwise they are drawn at random.
    """
    core = random_problem(theory, rng, max_vars, max_equations, constants)
    known = witness(core) if witness else None
    pairs: list[tuple[Term, Term]] = [(e.lhs, e.rhs) for e in core.equations]
    names = sorted(core.variables(), key=lambda v: (v.sort is Sort.ELEMENT, v.name))
    lists = [v for v in names if v.sort is Sort.LIST]
    pinned = rng.sample(lists, min(len(lists), rng.randint(1, 2)))
    elems = [v for v in names if v.sort is Sort.ELEMENT]
    if elems and rng.random() < 0.5:
        pinned.append(rng.choice(elems))
    for v in pinned:
        value = known[v] if known and v in known else random_ground(theory, rng, v.sort, constants)
        pairs.append((v, value))
    return to_standard_form(pairs, theory, constants)


def random_1in3(rng: random.Random, max_vars: int = 10, max_clauses: int = 8) -> list[tuple[str, str, str]]:
    n = rng.randint(3, max_vars)
    names = [f"p{i}" for i in range(n)]
    return [tuple(rng.choice(names) for _ in range(3)) for _ in range(rng.randint(1, max_clauses))]


def bc0_chain(n: int) -> Problem:
    """A solvable BC0 problem with exactly n equations, for growth measurements.

    A chain L0 =? bc(L1, e0), L1 =? bc(L2, e1), ... with every second list
    given a cons head and every third iv pinned to a constant.
    """
    eqs: list[Equation] = []
    i = 0
    while len(eqs) < n:
        cur, nxt = Var(f"L{i}", Sort.LIST), Var(f"L{i + 1}", Sort.LIST)
        iv = Var(f"e{i}", Sort.ELEMENT)
        eqs.append(Equation(cur, App("bc", (nxt, iv))))
        if i % 2 == 0:
            eqs.append(Equation(cur, App("cons", (Var(f"c{i}", Sort.ELEMENT), Var(f"T{i}", Sort.LIST)))))
        if i % 3 == 0:
            eqs.append(Equation(iv, Const("a")))
        i += 1
    return problem_from_equations(eqs[:n], Theory.BC0)
