"""Flattening of arbitrary equations into the catalog of standard shapes."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import SignatureError, SortError
from .rewrite import Theory
from .terms import (
    NIL,
    ZERO,
    App,
    Const,
    FreshSupply,
    Sort,
    Term,
    Var,
    sort_of,
    term_key,
    variables,
    well_typed,
    xor,
)


class Shape(enum.Enum):
    VAR_VAR_L = "U=?V"
    BC = "U=?bc(V,y)"
    DB = "U=?db(V,y)"
    CONS = "U=?cons(v,W)"
    NIL = "U=?nil"
    VAR_VAR_E = "u=?v"
    H = "v=?h(w,x)"
    G = "u=?g(w,y)"
    CONST = "u=?const"
    XOR = "u=?xor(...)"


_OP_SHAPE = {"bc": Shape.BC, "db": Shape.DB, "cons": Shape.CONS, "h": Shape.H, "g": Shape.G}


def classify(lhs: Var, rhs: Term) -> Shape:
    if isinstance(rhs, Var):
        if rhs.sort is not lhs.sort:
            raise SortError(f"{lhs.name} and {rhs.name} have different sorts")
        return Shape.VAR_VAR_L if lhs.sort is Sort.LIST else Shape.VAR_VAR_E
    if isinstance(rhs, Const):
        if lhs.sort is not Sort.ELEMENT:
            raise SortError(f"list variable {lhs.name} equated to a constant")
        return Shape.CONST
    if rhs == NIL:
        if lhs.sort is not Sort.LIST:
            raise SortError(f"element variable {lhs.name} equated to nil")
        return Shape.NIL
    if rhs.op == "xor":
        shape = Shape.XOR
    else:
        shape = _OP_SHAPE.get(rhs.op)
        if shape is None:
            raise ValueError(f"{rhs.op} does not occur in standard equations")
    if not all(isinstance(a, Var) for a in rhs.args):
        raise ValueError(f"non-flat right-hand side {rhs!r}")
    if not well_typed(rhs) or sort_of(rhs) is not lhs.sort:
        raise SortError(f"ill-sorted equation for {lhs.name}")
    return shape


@dataclass(frozen=True)
class Equation:
    lhs: Var
    rhs: Term
    shape: Shape = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "shape", classify(self.lhs, self.rhs))

    @property
    def is_list(self) -> bool:
        return self.lhs.sort is Sort.LIST

    def key(self) -> tuple:
        return (term_key(self.lhs), term_key(self.rhs))

    def __lt__(self, other: "Equation") -> bool:
        return self.key() < other.key()

    def variables(self) -> set[Var]:
        return {self.lhs} | variables(self.rhs)

    def __str__(self) -> str:
        from .syntax import format_term

        return f"{self.lhs.name} =? {format_term(self.rhs)}"


@dataclass
class Problem:
    theory: Theory
    equations: tuple[Equation, ...]
    supply: FreshSupply = field(default_factory=FreshSupply)
    constants: frozenset[str] = frozenset()
    source: tuple[tuple[Term, Term], ...] = ()

    @property
    def list_equations(self) -> list[Equation]:
        return [e for e in self.equations if e.is_list]

    @property
    def element_equations(self) -> list[Equation]:
        return [e for e in self.equations if not e.is_list]

    @property
    def original_variables(self) -> set[Var]:
        """Variables of the problem as given, before flattening."""
        if self.source:
            out: set[Var] = set()
            for s, t in self.source:
                out |= variables(s) | variables(t)
            return out
        return self.variables()

    def variables(self) -> set[Var]:
        out: set[Var] = set()
        for e in self.equations:
            out |= e.variables()
        return out


_FORBIDDEN = {
    Theory.BC0: {"db", "g", "xor", "enc", "car", "cdr"},
    Theory.BC1: {"db", "g", "car", "cdr"},
    Theory.DBC: {"xor", "enc", "car", "cdr"},
    Theory.DBC_PRIME: {"xor", "enc", "car", "cdr"},
    Theory.DBC_PLUS: {"xor", "enc", "car", "cdr"},
}


def _check_symbols(t: Term, theory: Theory) -> None:
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, App):
            if s.op in _FORBIDDEN[theory]:
                raise SignatureError(f"{s.op!r} is not allowed in a {theory.value} unification problem")
            stack.extend(s.args)
        elif s == ZERO and theory is not Theory.BC1:
            raise SignatureError("the xor unit 0 only exists in bc1")


class _Flattener:
    def __init__(self, theory: Theory, supply: FreshSupply):
        self.theory = theory
        self.supply = supply
        self.out: list[Equation] = []
        self.seen: set[Equation] = set()
        self.names: dict[Term, Var] = {}

    def add(self, lhs: Var, rhs: Term) -> None:
        if lhs == rhs:
            return
        eq = Equation(lhs, rhs)
        if eq not in self.seen:
            self.seen.add(eq)
            self.out.append(eq)

    def name(self, t: Term) -> Var:
        if isinstance(t, Var):
            return t
        v = self.names.get(t)
        if v is None:
            sort = sort_of(t)
            v = self.supply.fresh(sort, "L" if sort is Sort.LIST else "e")
            self.names[t] = v
            self.add(v, self.flat(t))
        return v

    def flat(self, t: Term) -> Term:
        if isinstance(t, (Var, Const)) or t == NIL:
            return t
        if t.op == "enc":
            return App("h", (self.name(t.args[0]), self.name(ZERO)))
        if t.op == "xor":
            return xor(*(self.name(a) for a in t.args))
        return App(t.op, tuple(self.name(a) for a in t.args))

    def top(self, lhs: Var, t: Term) -> None:
        if isinstance(t, Var):
            self.add(lhs, t)
        else:
            self.add(lhs, self.flat(t))


def to_standard_form(
    raw: Iterable[tuple[Term, Term]],
    theory: Theory,
    constants: Iterable[str] = (),
    supply: FreshSupply | None = None,
) -> Problem:
    raw = tuple(raw)
    supply = supply or FreshSupply()
    consts = set(constants)
    for s, t in raw:
        for side in (s, t):
            if not well_typed(side):
                raise SortError(f"ill-typed term {side!r}")
            _check_symbols(side, theory)
        if sort_of(s) is not sort_of(t):
            raise SortError(f"sort mismatch between {s!r} and {t!r}")
    fl = _Flattener(theory, supply)
    for s, t in raw:
        if isinstance(s, Var):
            fl.top(s, t)
        elif isinstance(t, Var):
            fl.top(t, s)
        else:
            sort = sort_of(s)
            v = supply.fresh(sort, "L" if sort is Sort.LIST else "e")
            fl.top(v, s)
            fl.top(v, t)
    for s, t in raw:
        for side in (s, t):
            for sub in _consts(side):
                consts.add(sub.name)
    return Problem(theory, tuple(fl.out), supply, frozenset(consts), raw)


def _consts(t: Term):
    if isinstance(t, Const):
        yield t
    elif isinstance(t, App):
        for a in t.args:
            yield from _consts(a)


def problem_from_equations(equations: Sequence[Equation], theory: Theory) -> Problem:
    raw = tuple((e.lhs, e.rhs) for e in equations)
    return to_standard_form(raw, theory)
