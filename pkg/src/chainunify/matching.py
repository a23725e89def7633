"""Matching modulo the rewrite theories.

``match_modulo`` looks for an instantiation of pattern parameters that makes
each pattern normalize to its (normalized) target.  It decomposes on equal
heads, forces bare parameters, solves a single free xor summand, expands a
list parameter under ``bc``/``db`` to the target's length, and tries the
``g``-collapse alternative.  Anything else is handed to an optional candidate
generator; without one the matcher gives up.  Every answer is re-checked by
normalization, so a returned instantiation is always correct.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Iterator

from .rewrite import Theory, normalize, xor_canonical
from .terms import NIL, App, Sort, Term, Var, replace, to_list, variables

Candidates = Callable[[Var], Iterable[Term]]


class _Budget:
    def __init__(self, limit: int):
        self.left = limit

    def spend(self) -> bool:
        self.left -= 1
        return self.left >= 0


def _nf(t: Term, th: Theory) -> Term:
    return normalize(t, th, check=False)


def _apply(t: Term, tau: dict[Var, Term]) -> Term:
    while variables(t) & tau.keys():
        t = replace(t, tau)
    return t


def _list_param(p: Term, params: set[Var]) -> Var | None:
    while isinstance(p, App) and p.op in ("bc", "db"):
        p = p.args[0]
    return p if isinstance(p, Var) and p in params else None


def _solve(
    pending: list[tuple[Term, Term]],
    tau: dict[Var, Term],
    params: set[Var],
    th: Theory,
    candidates: Candidates | None,
    budget: _Budget,
    fresh: Iterator[int],
) -> Iterator[dict[Var, Term]]:
    if not budget.spend():
        return
    while True:
        progress = False
        rest: list[tuple[Term, Term]] = []
        for i, (p, t) in enumerate(pending):
            p2 = _nf(_apply(p, tau), th) if tau else p
            free = variables(p2) & params
            if not free:
                if p2 != t:
                    return
                progress = True
                continue
            if isinstance(p2, Var):
                if p2.sort is not (Sort.LIST if _is_list(t) else Sort.ELEMENT):
                    return
                tau[p2] = t
                progress = True
                continue
            if isinstance(t, App) and p2.op == t.op and len(p2.args) == len(t.args) and p2.op != "xor":
                if p2.op == "g":
                    # decomposing is one alternative, the collapse is the other
                    alt = _g_alternative(p2, t, th, params)
                    if alt is not None:
                        later = rest + pending[i + 1 :]
                        yield from _solve(
                            later + list(zip(p2.args, t.args)), dict(tau), params, th, candidates, budget, fresh
                        )
                        yield from _solve(later + [alt], dict(tau), params, th, candidates, budget, fresh)
                        return
                rest.extend(zip(p2.args, t.args))
                progress = True
                continue
            if p2.op == "xor":
                forced = _force_xor(p2, t, params)
                if forced is not None:
                    v, val = forced
                    tau[v] = val
                    progress = True
                    continue
            if p2.op == "g":
                alt = _g_alternative(p2, t, th, params)
                if alt is not None:
                    rest.append(alt)
                    progress = True
                    continue
            if p2.op in ("bc", "db") and to_list(t) is not None:
                v = _list_param(p2, params)
                if v is not None:
                    n = len(to_list(t))
                    items = [Var(f"?e{next(fresh)}", Sort.ELEMENT) for _ in range(n)]
                    params |= set(items)
                    val: Term = NIL
                    for it in reversed(items):
                        val = App("cons", (it, val))
                    tau[v] = val
                    rest.append((p, t))
                    progress = True
                    continue
            rest.append((p, t))
        pending = rest
        if not pending:
            yield tau
            return
        if not progress:
            break
    if candidates is None:
        return
    free = sorted({v for p, _ in pending for v in variables(_nf(_apply(p, tau), th)) & params}, key=lambda v: v.name)
    if not free:
        return
    v = free[0]
    for c in candidates(v):
        yield from _solve(list(pending), {**tau, v: c}, params, th, candidates, budget, fresh)


def _is_list(t: Term) -> bool:
    if isinstance(t, Var):
        return t.sort is Sort.LIST
    return isinstance(t, App) and t.op in ("nil", "cons", "bc", "db", "cdr")


def _g_alternative(p: App, t: Term, th: Theory, params: set[Var]) -> tuple[Term, Term] | None:
    """g(P, r) ~ t via P := h(t, r), available once r is fixed."""
    if not th.is_dbc:
        return None
    lhs, r = p.args
    if variables(r) & params:
        return None
    return lhs, _nf(App("h", (t, r)), th)


def _force_xor(p: Term, t: Term, params: set[Var]) -> tuple[Var, Term] | None:
    summands = p.args if isinstance(p, App) and p.op == "xor" else (p,)
    free = [s for s in summands if variables(s) & params]
    if len(free) != 1 or not isinstance(free[0], Var):
        return None
    v = free[0]
    others = [s for s in summands if s is not v and s != v]
    return v, xor_canonical(t, *others)


def match_modulo(
    pairs: Iterable[tuple[Term, Term]],
    params: Iterable[Var],
    theory: Theory,
    candidates: Candidates | None = None,
    limit: int = 20_000,
) -> dict[Var, Term] | None:
    """First instantiation of params with nf(p) = nf(t) for every pair, or None."""
    pairs = [(p, _nf(t, theory)) for p, t in pairs]
    params = set(params)
    fresh = itertools.count()
    budget = _Budget(limit)
    for tau in _solve(pairs, {}, params, theory, candidates, budget, fresh):
        if all(_nf(_apply(p, tau), theory) == t for p, t in pairs):
            return tau
    if budget.left < 0:
        raise MatchBudgetExceeded()
    return None


class MatchBudgetExceeded(Exception):
    pass


def is_instance(general: dict[Var, Term], specific: dict[Var, Term], domain: Iterable[Var], theory: Theory) -> bool:
    """Sound check that ``specific`` is an instance of ``general`` on domain.

    Variables of ``general`` are instantiable, those of ``specific`` are rigid.
    """
    ren: dict[Var, Var] = {}

    def pattern(t: Term) -> Term:
        for v in variables(t):
            ren.setdefault(v, Var("?" + v.name, v.sort))
        return replace(t, ren)

    pairs = []
    for x in domain:
        pairs.append((pattern(general.get(x, x)), specific.get(x, x)))
    try:
        return match_modulo(pairs, set(ren.values()), theory, limit=2_000) is not None
    except MatchBudgetExceeded:
        return False
