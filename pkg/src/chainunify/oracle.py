"""Bounded brute-force ground truth.

Element variables range over normal forms of ground terms of depth at most
``max_depth``; list variables over lists of at most ``max_list_len`` entries,
each entry of depth at most ``entry_depth`` (``max_depth`` by default).

Enumeration is by backtracking over the problem's own variables.  When an
equation has a ground side and exactly one open variable on the other, the
candidate values for that variable are computed by inverting the term
(always a superset of the true values) instead of enumerating its domain.
Every full assignment is checked by normalization, so inversion only prunes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded
from .matching import MatchBudgetExceeded, match_modulo
from .rewrite import Theory, normalize, xor_canonical
from .standard import Problem
from .terms import NIL, ZERO, App, Const, Sort, Substitution, Term, Var, replace, term_key, to_list, variables


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 2
    constants: tuple[str, ...] = ("a", "b")
    max_list_len: int = 2
    entry_depth: int | None = None
    max_nodes: int = 2_000_000

    def __post_init__(self):
        if self.max_depth < 0 or self.max_list_len < 0:
            raise ValueError("budget bounds must be non-negative")

    @property
    def list_entry_depth(self) -> int:
        return self.max_depth if self.entry_depth is None else self.entry_depth


def _nf(t: Term, th: Theory) -> Term:
    return normalize(t, th, check=False)


_DOMAIN_CACHE: dict = {}


def element_domain(theory: Theory, constants: Sequence[str], depth: int) -> list[Term]:
    """Distinct normal forms of ground element terms of depth <= depth."""
    key = (theory, tuple(constants), depth)
    if key in _DOMAIN_CACHE:
        return _DOMAIN_CACHE[key]
    if depth <= 0:
        out: list[Term] = []
    else:
        level = [Const(c) for c in constants]
        if theory is Theory.BC1 and ZERO not in level:
            level.append(ZERO)
        seen = set(level)
        out = list(level)
        for _ in range(depth - 1):
            prev = list(out)
            fresh = []
            ops = ["h"]
            if theory.is_dbc:
                ops.append("g")
            if theory is Theory.BC1:
                ops.append("xor")
            for op in ops:
                for s in prev:
                    for t in prev:
                        u = _nf(App(op, (s, t)), theory)
                        if u not in seen:
                            seen.add(u)
                            fresh.append(u)
            fresh.sort(key=term_key)
            out += fresh
    _DOMAIN_CACHE[key] = out
    return out


def list_domain(entries: Sequence[Term], max_len: int) -> Iterator[Term]:
    for n in range(max_len + 1):
        for items in itertools.product(entries, repeat=n):
            t: Term = NIL
            for it in reversed(items):
                t = App("cons", (it, t))
            yield t


class _Space:
    def __init__(self, theory: Theory, budget: SearchBudget):
        self.theory = theory
        self.budget = budget
        self.elements = element_domain(theory, budget.constants, budget.max_depth)
        self.element_set = set(self.elements)
        self.entries = element_domain(theory, budget.constants, budget.list_entry_depth)
        self.entry_set = set(self.entries)

    def lists(self) -> Iterator[Term]:
        # generated lazily: the node cap usually stops the search long before
        return list_domain(self.entries, self.budget.max_list_len)

    def contains(self, v: Var, t: Term) -> bool:
        if v.sort is Sort.ELEMENT:
            return t in self.element_set
        items = to_list(t)
        return items is not None and len(items) <= self.budget.max_list_len and all(i in self.entry_set for i in items)

    def domain(self, v: Var) -> Iterable[Term]:
        return self.elements if v.sort is Sort.ELEMENT else self.lists()


# --- inversion --------------------------------------------------------------


def invert(p: Term, target: Term, y: Var, th: Theory) -> list[Term] | None:
    """Values for y with nf(p[y:=value]) == target; superset, or None if unknown.

    p is normal and contains y exactly once; every other variable is absent.
    """
    if p == y:
        return [target]
    if not isinstance(p, App):
        return []
    op, args = p.op, p.args
    idx = [i for i, a in enumerate(args) if y in variables(a)]
    if len(idx) != 1:
        return None
    i = idx[0]
    if op == "xor":
        others = [a for j, a in enumerate(args) if j != i]
        return invert(args[i], xor_canonical(target, *others), y, th)
    if op == "enc":
        if isinstance(target, App) and target.op == "enc":
            return invert(args[0], target.args[0], y, th)
        return []
    if op in ("h", "cons"):
        if th is Theory.BC1 and op == "h":
            return invert(App("enc", (xor_canonical(*args),)), target, y, th)
        if isinstance(target, App) and target.op == op:
            if _nf(args[1 - i], th) != target.args[1 - i]:
                return []
            return invert(args[i], target.args[i], y, th)
        return []
    if op == "g":
        out: list[Term] = []
        if isinstance(target, App) and target.op == "g" and _nf(args[1 - i], th) == target.args[1 - i]:
            out += invert(args[i], target.args[i], y, th) or []
        if i == 0:
            sub = invert(args[0], _nf(App("h", (target, args[1])), th), y, th)
            if sub is None:
                return None
            out += sub
        else:
            first = args[0]
            if isinstance(first, App) and first.op == "h" and first.args[0] == target:
                sub = invert(args[1], first.args[1], y, th)
                if sub is None:
                    return None
                out += sub
        return out
    if op in ("bc", "db"):
        items = to_list(target)
        if items is None:
            return []
        lst, iv = args
        if i == 0:
            lists = _unbc(items, iv, th) if op == "bc" else _undb(items, iv, th)
            if lists is None:
                return None
            out = []
            for w in lists:
                sub = invert(lst, w, y, th)
                if sub is None:
                    return None
                out += sub
            return out
        # y inside the chaining value: only the first block constrains it
        if not items:
            return None
        first = to_list(_nf(lst, th))
        if not first:
            return None
        head = App("h" if op == "bc" else "g", (first[0], iv))
        return invert(_nf(head, th), items[0], y, th)
    return None


def _unh(t: Term, prev: Term, th: Theory) -> Term | None:
    """The w with h(w, prev) == t, if any."""
    if th is Theory.BC1:
        if isinstance(t, App) and t.op == "enc":
            return xor_canonical(t.args[0], prev)
        return None
    if isinstance(t, App) and t.op == "h" and t.args[1] == prev:
        return t.args[0]
    return None


def _unbc(items: list[Term], iv: Term, th: Theory) -> list[Term] | None:
    if variables(iv):
        return None
    out: list[Term] = []
    prev = iv
    for t in items:
        w = _unh(t, prev, th)
        if w is None:
            return []
        out.append(w)
        prev = t
    lst: Term = NIL
    for w in reversed(out):
        lst = App("cons", (w, lst))
    return [lst]


def _undb(items: list[Term], iv: Term, th: Theory) -> list[Term] | None:
    if variables(iv):
        return None
    # each block: g(w, prev) == t  iff  w = h(t, prev)  or  t = g(w, prev) irreducibly
    results: list[list[Term]] = [[]]
    prev_of = [iv]
    for t in items:
        nxt: list[list[Term]] = []
        nprev: list[Term] = []
        for acc, prev in zip(results, prev_of):
            cands = [_nf(App("h", (t, prev)), th)]
            if isinstance(t, App) and t.op == "g" and t.args[1] == prev:
                cands.append(t.args[0])
            for w in cands:
                nxt.append(acc + [w])
                nprev.append(w)
        results, prev_of = nxt, nprev
    out = []
    for ws in results:
        lst: Term = NIL
        for w in reversed(ws):
            lst = App("cons", (w, lst))
        out.append(lst)
    return out


# --- enumeration --------------------------------------------------------------


def _pairs_of(problem: Problem) -> list[tuple[Term, Term]]:
    if problem.source:
        return list(problem.source)
    return [(e.lhs, e.rhs) for e in problem.equations]


def brute_force_unifiers(problem: Problem, budget: SearchBudget) -> list[Substitution]:
    """All ground solutions within the budget, on the problem's own variables."""
    th = problem.theory
    space = _Space(th, budget)
    pairs = _pairs_of(problem)
    names = sorted({v for s, t in pairs for v in variables(s) | variables(t)}, key=term_key)
    nodes = [0]
    out: list[Substitution] = []

    def rec(assign: dict[Var, Term]) -> None:
        nodes[0] += 1
        if nodes[0] > budget.max_nodes:
            raise BudgetExceeded(f"oracle explored more than {budget.max_nodes} nodes")
        # check closed equations, look for an inversion opportunity
        forced: tuple[Var, list[Term]] | None = None
        for s, t in pairs:
            s2, t2 = replace(s, assign), replace(t, assign)
            vs, vt = variables(s2), variables(t2)
            if not vs and not vt:
                if _nf(s2, th) != _nf(t2, th):
                    return
                continue
            if forced is None:
                for open_side, ground, free in ((s2, t2, vs), (t2, s2, vt)):
                    if (free and not variables(ground)) and len(free) == 1:
                        (y,) = free
                        pat = _nf(open_side, th)
                        if _count(pat, y) != 1:
                            continue
                        cands = invert(pat, _nf(ground, th), y, th)
                        if cands is not None:
                            forced = (y, cands)
                            break
        if len(assign) == len(names):
            out.append(Substitution([(v, assign[v]) for v in names]))
            return
        if forced is not None:
            y, cands = forced
            for c in dict.fromkeys(cands):
                if space.contains(y, c):
                    rec({**assign, y: c})
            return
        y = next(v for v in names if v not in assign)
        for c in space.domain(y):
            rec({**assign, y: c})

    rec({})
    out.sort(key=lambda s: [term_key(t) for t in s.values()])
    return out


def _count(t: Term, v: Var) -> int:
    if t == v:
        return 1
    if isinstance(t, App):
        return sum(_count(a, v) for a in t.args)
    return 0


def naive_unifiers(problem: Problem, budget: SearchBudget) -> list[Substitution]:
    """Plain product enumeration; only for cross-checking on tiny budgets."""
    th = problem.theory
    space = _Space(th, budget)
    pairs = _pairs_of(problem)
    names = sorted({v for s, t in pairs for v in variables(s) | variables(t)}, key=term_key)
    out = []
    for values in itertools.product(*(space.domain(v) for v in names)):
        m = dict(zip(names, values))
        if all(_nf(replace(s, m), th) == _nf(replace(t, m), th) for s, t in pairs):
            out.append(Substitution(list(m.items())))
    out.sort(key=lambda s: [term_key(t) for t in s.values()])
    return out


# --- subsumption ----------------------------------------------------------------


UNKNOWN = "unknown"


def subsumes(
    general: Substitution,
    ground: Substitution,
    theory: Theory,
    budget: SearchBudget | None = None,
    domain: Iterable[Var] | None = None,
):
    """True / False, or ``UNKNOWN`` when the search budget runs out.

    Parameters of ``general`` are instantiated so that general(x) equals
    ground(x) modulo the theory for each x in domain (default: ground's domain).
    """
    budget = budget or SearchBudget()
    dom = list(domain) if domain is not None else list(ground)
    ren: dict[Var, Var] = {}

    def pattern(t: Term) -> Term:
        for v in variables(t):
            ren.setdefault(v, Var("?" + v.name, v.sort))
        return replace(t, ren)

    pairs = [(pattern(general.get(x, x)), ground.get(x, x)) for x in dom]
    params = set(ren.values())
    targets = [t for _, t in pairs]
    space = _Space(theory, budget)
    pool_e = list(dict.fromkeys(space.elements + [s for t in targets for s in _subterms(t) if _is_elem(s)]))
    pool_l = list(dict.fromkeys(s for t in targets for s in _subterms(t) if to_list(s) is not None))

    def candidates(v: Var) -> Iterable[Term]:
        if v.sort is Sort.ELEMENT:
            return pool_e
        return itertools.chain(pool_l, space.lists())

    try:
        tau = match_modulo(pairs, params, theory, candidates, limit=50_000)
    except MatchBudgetExceeded:
        return UNKNOWN
    return tau is not None


def _subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from _subterms(a)


def _is_elem(t: Term) -> bool:
    if isinstance(t, Var):
        return t.sort is Sort.ELEMENT
    return isinstance(t, Const) or (isinstance(t, App) and t.op in ("h", "g", "enc", "xor", "car"))


def covered(unifiers: Sequence[Substitution], ground: Substitution, theory: Theory, budget: SearchBudget | None = None):
    """Whether some unifier subsumes ground; ``UNKNOWN`` if only undecided checks remain."""
    unknown = False
    for u in unifiers:
        r = subsumes(u, ground, theory, budget)
        if r is True:
            return True
        if r == UNKNOWN:
            unknown = True
    return UNKNOWN if unknown else False


# --- 1-in-3 SAT ------------------------------------------------------------------


def sat1in3(clauses: Sequence[Sequence[str]]) -> bool:
    """Exhaustive check for an assignment with exactly one true literal per clause."""
    names = sorted({x for c in clauses for x in c})
    if len(names) > 20:
        raise ValueError("sat1in3 is limited to 20 variables")
    for bits in itertools.product((False, True), repeat=len(names)):
        val = dict(zip(names, bits))
        if all(sum(val[x] for x in c) == 1 for c in clauses):
            return True
    return False
