"""Propagation graph over list-variable classes.

Nodes are classes of list variables equated by ``U =? V``; arcs come from
``cons``, ``bc`` and ``db`` equations.  ``bc`` and ``db`` arcs also act as
undirected chaining edges.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .standard import Equation, Shape
from .terms import Var, term_key

CONS, BC, DB = "cons", "bc", "db"
_LABEL = {Shape.CONS: CONS, Shape.BC: BC, Shape.DB: DB}


@dataclass(frozen=True)
class Arc:
    src: Var
    label: str
    dst: Var
    witness: Equation


@dataclass(frozen=True)
class Violation:
    node: Var
    cycle: tuple[tuple[Var, str], ...]  # (from-node, edge text) pairs, closed at node

    def describe(self) -> str:
        parts = []
        for v, edge in self.cycle:
            parts.append(f"{v.name} {edge}")
        return " ".join(parts) + f" {self.node.name}"


class PropagationGraph:
    def __init__(self, equations: Iterable[Equation]):
        eqs = [e for e in equations if e.is_list]
        self.equations = eqs
        parent: dict[Var, Var] = {}

        def find(v: Var) -> Var:
            parent.setdefault(v, v)
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for e in eqs:
            find(e.lhs)
            for v in e.variables():
                find(v)
            if e.shape is Shape.VAR_VAR_L:
                a, b = find(e.lhs), find(e.rhs)
                if a != b:
                    lo, hi = sorted((a, b), key=term_key)
                    parent[hi] = lo
        self._find = find
        self._known = set(parent)
        self.classes: dict[Var, list[Var]] = {}
        for v in list(parent):
            self.classes.setdefault(find(v), []).append(v)
        for members in self.classes.values():
            members.sort(key=term_key)
        self.arcs: list[Arc] = []
        for e in eqs:
            label = _LABEL.get(e.shape)
            if label is None:
                continue
            target = e.rhs.args[1] if label == CONS else e.rhs.args[0]
            self.arcs.append(Arc(find(e.lhs), label, find(target), e))
        self.out: dict[Var, list[Arc]] = {c: [] for c in self.classes}
        self.inc: dict[Var, list[Arc]] = {c: [] for c in self.classes}
        for a in self.arcs:
            self.out[a.src].append(a)
            self.inc[a.dst].append(a)

    def find(self, v: Var) -> Var:
        if v not in self._known:
            return v
        return self._find(v)

    def nodes(self) -> list[Var]:
        return sorted(self.classes, key=term_key)

    def dump(self) -> list[str]:
        return [f"[{a.src.name}] -{a.label}-> [{a.dst.name}] via {a.witness}" for a in self.arcs]

    # --- reachability ----------------------------------------------------

    def _reach(self, start: Var, labels: set[str], undirected: bool = False) -> set[Var]:
        seen = {start}
        todo = [start]
        while todo:
            n = todo.pop()
            nxt = [a.dst for a in self.out.get(n, ()) if a.label in labels]
            if undirected:
                nxt += [a.src for a in self.inc.get(n, ()) if a.label in labels]
            for m in nxt:
                if m not in seen:
                    seen.add(m)
                    todo.append(m)
        return seen

    def reaches_star(self, a: Var, b: Var, labels: set[str]) -> bool:
        a, b = self.find(a), self.find(b)
        return b in self._reach(a, labels)

    def reaches_plus(self, a: Var, b: Var, labels: set[str]) -> bool:
        a, b = self.find(a), self.find(b)
        firsts = [arc.dst for arc in self.out.get(a, ()) if arc.label in labels]
        return any(b in self._reach(f, labels) for f in firsts)


def build(equations: Iterable[Equation]) -> PropagationGraph:
    return PropagationGraph(equations)


def nonnil(graph: PropagationGraph) -> set[Var]:
    """Least fixpoint: cons sources are in; bc/db sources are in iff targets are."""
    inside: set[Var] = {a.src for a in graph.arcs if a.label == CONS}
    changed = True
    while changed:
        changed = False
        for a in graph.arcs:
            if a.label == CONS:
                continue
            if (a.src in inside) != (a.dst in inside):
                inside.add(a.src)
                inside.add(a.dst)
                changed = True
    out: set[Var] = set()
    for rep in inside:
        out.update(graph.classes[rep])
    return out


def nonnil_by_chaining(graph: PropagationGraph) -> set[Var]:
    """Characterization by chaining: U ~c* V and V >cons W for some V, W."""
    sources = {a.src for a in graph.arcs if a.label == CONS}
    out: set[Var] = set()
    for rep in graph.classes:
        comp = graph._reach(rep, {BC, DB}, undirected=True)
        if comp & sources:
            out.update(graph.classes[rep])
    return out


def _mixed_neighbours(graph: PropagationGraph, n: Var):
    for a in graph.out.get(n, ()):
        yield a.dst, f">{a.label}"
    for a in graph.inc.get(n, ()):
        if a.label != CONS:
            yield a.src, f"<{a.label}"


def occur_check_violation(graph: PropagationGraph) -> Violation | None:
    """A class lying on a cycle with at least one cons arc, chaining edges undirected."""
    best: Violation | None = None
    for arc in graph.arcs:
        if arc.label != CONS:
            continue
        # path from arc.dst back to arc.src
        prev: dict[Var, tuple[Var, str] | None] = {arc.dst: None}
        queue = deque([arc.dst])
        while queue and arc.src not in prev:
            n = queue.popleft()
            for m, edge in _mixed_neighbours(graph, n):
                if m not in prev:
                    prev[m] = (n, edge)
                    queue.append(m)
        if arc.src not in prev:
            continue
        steps: list[tuple[Var, str]] = []
        n = arc.src
        while prev[n] is not None:
            p, edge = prev[n]
            steps.append((p, edge))
            n = p
        steps.reverse()
        cycle = [(arc.src, ">cons")] + steps
        start = min(range(len(cycle)), key=lambda i: term_key(cycle[i][0]))
        cycle = cycle[start:] + cycle[:start]
        v = Violation(cycle[0][0], tuple(cycle))
        if best is None or (term_key(v.node), len(v.cycle)) < (term_key(best.node), len(best.cycle)):
            best = v
    return best


BC_STAR, DB_STAR, C_PLUS, C_SIM_STAR = "BC_STAR", "DB_STAR", "C_PLUS", "C_SIM_STAR"


def relation_query(graph: PropagationGraph, kind: str, a: Var, b: Var) -> bool:
    if kind == BC_STAR:
        return graph.reaches_star(a, b, {BC})
    if kind == DB_STAR:
        return graph.reaches_star(a, b, {DB})
    if kind == C_PLUS:
        return graph.reaches_plus(a, b, {BC, DB})
    if kind == C_SIM_STAR:
        a, b = graph.find(a), graph.find(b)
        return b in graph._reach(a, {BC, DB}, undirected=True)
    raise ValueError(f"unknown relation {kind!r}")
