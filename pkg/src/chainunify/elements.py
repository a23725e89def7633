"""Solvers for the residual element equations.

* BC0: syntactic unification, ``h`` free.
* DBC: every ``u =? g(x, v)`` is either kept (``g`` stays irreducible and is
  treated as a free symbol) or narrowed to ``x =? h(u, v)``; the choices are
  explored with unit propagation.
* BC1: ``h(x, y)`` is ``enc(x ^ y)``; aliens are identified by an ordered
  partition and the remaining linear system is solved over GF(2) with the
  pivot order enforcing the occur check on ``enc``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .rewrite import Theory, normalize, xor_canonical
from .standard import Equation, Shape
from .terms import (
    ZERO,
    App,
    Const,
    Sort,
    Substitution,
    Term,
    Var,
    term_key,
    variables,
)


@dataclass(frozen=True)
class Fail:
    reason: str
    detail: str = ""

    def __bool__(self):
        return False

    def __str__(self):
        return f"{self.reason}: {self.detail}" if self.detail else self.reason


# --- syntactic unification -------------------------------------------------


def _walk(t: Term, s: dict[Var, Term]) -> Term:
    while isinstance(t, Var) and t in s:
        t = s[t]
    return t


def _occurs(v: Var, t: Term, s: dict[Var, Term]) -> bool:
    t = _walk(t, s)
    if t == v:
        return True
    if isinstance(t, App):
        return any(_occurs(v, a, s) for a in t.args)
    return False


def unify_syntactic(pairs: Iterable[tuple[Term, Term]], subst: dict[Var, Term] | None = None) -> dict[Var, Term] | Fail:
    """Robinson unification with all symbols free; triangular result."""
    s = dict(subst or {})
    stack = list(pairs)
    while stack:
        a, b = stack.pop()
        a, b = _walk(a, s), _walk(b, s)
        if a == b:
            continue
        if isinstance(a, Var) and isinstance(b, Var):
            hi, lo = (a, b) if term_key(b) < term_key(a) else (b, a)
            s[hi] = lo
        elif isinstance(a, Var) or isinstance(b, Var):
            v, t = (a, b) if isinstance(a, Var) else (b, a)
            if _occurs(v, t, s):
                return Fail("occur-check", f"{v.name} occurs in {t!r}")
            s[v] = t
        elif isinstance(a, App) and isinstance(b, App) and a.op == b.op and len(a.args) == len(b.args):
            stack.extend(zip(a.args, b.args))
        else:
            return Fail("clash", f"{a!r} vs {b!r}")
    return s


def resolve(s: dict[Var, Term]) -> Substitution:
    cache: dict[Var, Term] = {}

    def full(t: Term) -> Term:
        if isinstance(t, Var):
            if t in cache:
                return cache[t]
            if t in s:
                cache[t] = full(s[t])
                return cache[t]
            return t
        if isinstance(t, App) and t.args:
            return App(t.op, tuple(full(a) for a in t.args)) if t.op != "xor" else xor_canonical(*(full(a) for a in t.args))
        return t

    return Substitution(sorted(((v, full(v)) for v in s), key=lambda vt: term_key(vt[0])))


def _pairs(eqs: Iterable[Equation]) -> list[tuple[Term, Term]]:
    return [(e.lhs, e.rhs) for e in eqs]


def solve_bc0(eqs: Sequence[Equation]) -> Substitution | Fail:
    for e in eqs:
        if e.shape in (Shape.G, Shape.XOR):
            raise ValueError(f"{e.shape.value} equations do not belong to bc0")
    out = unify_syntactic(_pairs(eqs))
    if isinstance(out, Fail):
        return out
    return resolve(out)


# --- DBC: keep-or-narrow for g-equations -----------------------------------


def iter_solve_dbc(eqs: Sequence[Equation]) -> Iterator[Substitution]:
    plain = [(e.lhs, e.rhs) for e in eqs if e.shape is not Shape.G]
    gs = [(e.lhs, e.rhs.args[0], e.rhs.args[1]) for e in eqs if e.shape is Shape.G]
    base = unify_syntactic(plain)
    if isinstance(base, Fail):
        return

    def keep(s, ge):
        u, x, v = ge
        return unify_syntactic([(u, App("g", (x, v)))], s)

    def narrow(s, ge):
        u, x, v = ge
        return unify_syntactic([(x, App("h", (u, v)))], s)

    def search(s, pending):
        pending = list(pending)
        while True:
            open_: list = []
            for i, ge in enumerate(pending):
                k, n = keep(s, ge), narrow(s, ge)
                if isinstance(k, Fail) and isinstance(n, Fail):
                    return
                if isinstance(k, Fail) or k == s:
                    s = n if isinstance(k, Fail) else k
                    open_.extend(pending[i + 1 :])
                    break
                if isinstance(n, Fail) or n == s:
                    s = k if isinstance(n, Fail) else n
                    open_.extend(pending[i + 1 :])
                    break
                open_.append(ge)
            else:
                pending = open_
                break
            pending = open_
        if not pending:
            yield s
            return
        ge, rest = pending[0], pending[1:]
        for choice in (keep(s, ge), narrow(s, ge)):
            if not isinstance(choice, Fail):
                yield from search(choice, rest)

    for s in search(base, gs):
        yield resolve(s)


def solve_dbc(eqs: Sequence[Equation]) -> list[Substitution] | Fail:
    out = dedupe(iter_solve_dbc(eqs))
    return out if out else Fail("no-branch", "every keep/narrow choice fails")


# --- BC1: xor with a free unary enc ---------------------------------------


class XorPoly:
    """GF(2) combination of atoms; equal atoms cancel, ``0`` is never stored."""

    __slots__ = ("atoms",)

    def __init__(self, atoms: Iterable[Term] = ()):
        acc: set[Term] = set()
        for a in atoms:
            if a == ZERO:
                continue
            acc ^= {a}
        self.atoms = frozenset(acc)

    def __xor__(self, other: "XorPoly") -> "XorPoly":
        p = XorPoly()
        p.atoms = self.atoms ^ other.atoms
        return p

    def __eq__(self, other):
        return isinstance(other, XorPoly) and self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def __bool__(self):
        return bool(self.atoms)

    def to_term(self) -> Term:
        return xor_canonical(*self.atoms)

    def __repr__(self):
        return repr(self.to_term())


class _Atom(Const):
    """Placeholder for an alien class inside the linear system."""


def _ordered_partitions(items: list) -> Iterator[list[list]]:
    """Every way of splitting items into an ordered sequence of non-empty blocks."""
    if not items:
        yield []
        return
    n = len(items)
    for labels in itertools.product(range(n), repeat=n):
        used = sorted(set(labels))
        if used != list(range(len(used))):
            continue
        blocks = [[] for _ in used]
        for item, lab in zip(items, labels):
            blocks[lab].append(item)
        yield blocks


def _gauss(rows: list[int], pivot_cols: int) -> tuple[list[tuple[int, int]], bool]:
    """Gauss-Jordan over GF(2); bit i is column i; pivots only among the first pivot_cols."""
    rows = [r for r in rows if r]
    done: list[tuple[int, int]] = []
    for col in range(pivot_cols):
        bit = 1 << col
        idx = next((i for i, r in enumerate(rows) if r & bit), None)
        if idx is None:
            continue
        piv = rows.pop(idx)
        rows = [r ^ piv if r & bit else r for r in rows]
        done = [(c, r ^ piv if r & bit else r) for c, r in done]
        done.append((col, piv))
    consistent = all(r == 0 for r in rows)
    return done, consistent


def iter_solve_bc1(eqs: Sequence[Equation], max_branches: int = 200_000) -> Iterator[Substitution]:
    for e in eqs:
        if e.shape is Shape.G:
            raise ValueError("g equations do not belong to bc1")
    h_eqs = [e for e in eqs if e.shape is Shape.H]
    aliens = sorted({e.lhs for e in h_eqs}, key=term_key)
    args_of: dict[Var, list[tuple[Term, Term]]] = {u: [] for u in aliens}
    for e in h_eqs:
        args_of[e.lhs].append(e.rhs.args)
    # aliens built from identical argument pairs must coincide
    parent = {u: u for u in aliens}

    def find(u):
        while parent[u] != u:
            u = parent[u]
        return u

    by_args: dict[frozenset, Var] = {}
    for u in aliens:
        for a, b in args_of[u]:
            key = XorPoly([a, b]).atoms
            if key in by_args:
                parent[find(u)] = find(by_args[key])
            else:
                by_args[key] = u
    groups: dict[Var, list[Var]] = {}
    for u in aliens:
        groups.setdefault(find(u), []).append(u)
    units = sorted(groups.values(), key=lambda g: term_key(g[0]))

    linear: list[list[Term]] = []
    for e in eqs:
        if e.shape is Shape.H:
            continue
        if e.shape is Shape.XOR:
            linear.append([e.lhs, *e.rhs.args])
        else:
            linear.append([e.lhs, e.rhs])
    plain_vars = sorted(
        {v for e in eqs for v in e.variables() if v.sort is Sort.ELEMENT} - set(aliens),
        key=term_key,
    )
    seen: set = set()
    count = 0
    for blocks in _ordered_partitions(units):
        count += 1
        if count > max_branches:
            from .errors import BudgetExceeded

            raise BudgetExceeded(f"more than {max_branches} alien orderings")
        classes = [sum(b, []) for b in blocks]
        sol = _solve_linear_branch(classes, args_of, linear, plain_vars)
        if sol is None:
            continue
        key = frozenset(sol.items())
        if key not in seen:
            seen.add(key)
            yield sol


def _solve_linear_branch(classes, args_of, linear, plain_vars) -> Substitution | None:
    K = len(classes)
    atoms = [_Atom(f"§E{k}") for k in range(K)]
    svars = [Var(f"s#{k}", Sort.ELEMENT) for k in range(K)]
    alien_atom: dict[Var, Term] = {}
    for k, cls in enumerate(classes):
        for u in cls:
            alien_atom[u] = atoms[k]
    # decreasing order: unrestricted vars, then E_K, s_K, ..., E_1, s_1; constants after
    columns: list[Term] = list(plain_vars)
    for k in reversed(range(K)):
        columns += [atoms[k], svars[k]]
    n_pivot = len(columns)
    col_index = {t: i for i, t in enumerate(columns)}

    def encode(terms: Iterable[Term]) -> int:
        row = 0
        for t in terms:
            t = alien_atom.get(t, t)
            if t == ZERO:
                continue
            if t not in col_index:
                col_index[t] = len(columns)
                columns.append(t)
            row ^= 1 << col_index[t]
        return row

    rows = [encode(r) for r in linear]
    for k, cls in enumerate(classes):
        for u in cls:
            for a, b in args_of[u]:
                rows.append(encode([a, b, svars[k]]))
    pivots, consistent = _gauss(rows, n_pivot)
    if not consistent:
        return None
    value: dict[Term, XorPoly] = {}
    for col, row in pivots:
        head = columns[col]
        if isinstance(head, _Atom):
            return None
        rest = [columns[i] for i in range(len(columns)) if row >> i & 1 and i != col]
        value[head] = XorPoly(rest)
    # classes must stay distinct atoms
    enc_value: dict[Term, Term] = {}
    for k in range(K):
        s_val = value.get(svars[k], XorPoly([svars[k]]))
        inner = xor_canonical(*(enc_value.get(a, a) for a in s_val.atoms))
        if any(isinstance(a, _Atom) and a not in enc_value for a in s_val.atoms):
            return None
        enc_value[atoms[k]] = App("enc", (inner,))
    if len(set(enc_value.values())) < K:
        return None

    def materialize(p: XorPoly) -> Term:
        return xor_canonical(*(enc_value.get(a, a) for a in p.atoms))

    bindings: list[tuple[Var, Term]] = []
    for v in plain_vars:
        if v in value:
            bindings.append((v, materialize(value[v])))
    for k, cls in enumerate(classes):
        for u in cls:
            bindings.append((u, enc_value[atoms[k]]))
    bindings.sort(key=lambda vt: term_key(vt[0]))
    return Substitution([(v, t) for v, t in bindings if t != v])


def solve_bc1(eqs: Sequence[Equation]) -> list[Substitution] | Fail:
    out = dedupe(iter_solve_bc1(eqs))
    return out if out else Fail("no-branch", "no alien identification yields a solution")


# --- shared ----------------------------------------------------------------


def canonical_key(s: Substitution, keep: Iterable[Var] | None = None) -> tuple:
    """Structural key after renaming free variables in order of appearance."""
    items = sorted(s.items(), key=lambda vt: term_key(vt[0]))
    if keep is not None:
        keep = set(keep)
        items = [(v, t) for v, t in items if v in keep]
    dom = {v for v, _ in items}
    ren: dict[Var, Var] = {}

    def rename(t: Term) -> Term:
        if isinstance(t, Var):
            if t in dom:
                return t
            if t not in ren:
                ren[t] = Var(f"_{len(ren)}", t.sort)
            return ren[t]
        if isinstance(t, App) and t.args:
            return App(t.op, tuple(rename(a) for a in t.args))
        return t

    return tuple((v, rename(t)) for v, t in items)


def dedupe(subs: Iterable[Substitution]) -> list[Substitution]:
    seen: set = set()
    out = []
    for s in subs:
        k = canonical_key(s)
        if k not in seen:
            seen.add(k)
            out.append(s)
    return out


def iter_solve(eqs: Sequence[Equation], theory: Theory) -> Iterator[Substitution]:
    """All mgus of the element equations for the given theory."""
    if theory is Theory.BC0:
        r = solve_bc0(eqs)
        if not isinstance(r, Fail):
            yield r
    elif theory is Theory.BC1:
        yield from iter_solve_bc1(eqs)
    else:
        yield from iter_solve_dbc(eqs)


def normalize_substitution(s: Substitution, theory: Theory) -> Substitution:
    return Substitution([(v, normalize(t, theory, check=False)) for v, t in s.items()])


__all__ = [
    "Fail",
    "XorPoly",
    "canonical_key",
    "dedupe",
    "iter_solve",
    "iter_solve_bc1",
    "iter_solve_dbc",
    "normalize_substitution",
    "resolve",
    "solve_bc0",
    "solve_bc1",
    "solve_dbc",
    "unify_syntactic",
    "variables",
]
