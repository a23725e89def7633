"""End-to-end unification: list inference, element solving, extraction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .elements import Fail, canonical_key, iter_solve, solve_bc0
from .engine import (
    Failure,
    InferenceState,
    SearchStats,
    View,
    initial_state,
    push_count,
    saturate,
    search,
)
from .errors import InconsistentInput
from .matching import is_instance
from .rewrite import Theory, normalize
from .standard import Equation, Problem, Shape
from .terms import NIL, Sort, Substitution, Term, Var, term_key, variables


@dataclass
class SolvedForm:
    list_part: tuple[Equation, ...]
    element_residue: tuple[Equation, ...]
    nil_completed: bool = False

    def lines(self) -> list[str]:
        return [str(e) for e in self.list_part + self.element_residue]


@dataclass
class UnifyResult:
    problem: Problem
    unifiers: list[Substitution]
    solved_forms: list[SolvedForm] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    stats: SearchStats = field(default_factory=SearchStats)
    trace: list[str] = field(default_factory=list)
    bound: int = 0

    @property
    def unifiable(self) -> bool:
        return bool(self.unifiers)

    @property
    def reason(self) -> str | None:
        if self.unifiers:
            return None
        return self.failures[0] if self.failures else "no solution"

    def parameters(self, sigma: Substitution) -> list[Var]:
        """Variables left free by sigma: unbound originals and range variables."""
        free: set[Var] = {v for v in self.problem.original_variables if v not in sigma}
        for t in sigma.values():
            free |= variables(t)
        return sorted(free, key=term_key)


def solved_form(state: InferenceState) -> SolvedForm:
    lst = tuple(sorted(e for e in state.equations if e.is_list))
    el = tuple(sorted(e for e in state.equations if not e.is_list))
    return SolvedForm(lst, el)


def step_bound(problem: Problem) -> int:
    """m0 * n0: chaining equations times variables of the input."""
    kinds = (Shape.BC, Shape.DB) if problem.theory.is_dbc else (Shape.BC,)
    m0 = sum(1 for e in problem.equations if e.shape in kinds)
    return m0 * len(problem.variables())


def extract_unifier(sf: SolvedForm, element_solution: Substitution, problem: Problem) -> Substitution:
    """Unifier on the problem's variables, values normalized."""
    for v in element_solution:
        if v.sort is not Sort.ELEMENT:
            raise InconsistentInput(f"element solution binds list variable {v.name}")
    bound = {e.lhs for e in sf.list_part}
    if bound & set(element_solution):
        raise InconsistentInput("element solution rebinds a list variable")
    lists = Substitution([(e.lhs, e.rhs) for e in sf.list_part]).resolved()
    merged = lists.compose(element_solution)
    theory = problem.theory
    out = []
    for v in sorted(problem.original_variables, key=term_key):
        if v in merged:
            t = normalize(merged[v], theory, check=False)
            if t != v:
                out.append((v, t))
    return Substitution(out)


def verify(problem: Problem, sigma: Substitution) -> bool:
    """Each original equation holds under sigma, free variables read as constants."""
    th = problem.theory
    for s, t in problem.source or [(e.lhs, e.rhs) for e in problem.equations]:
        if normalize(sigma.apply(s), th, check=False) != normalize(sigma.apply(t), th, check=False):
            return False
    return True


def _element_solutions(eqs: tuple[Equation, ...], theory: Theory) -> tuple[list[Substitution], str | None]:
    if theory is Theory.BC0:
        r = solve_bc0(eqs)
        if isinstance(r, Fail):
            return [], f"element equations unsolvable ({r})"
        return [r], None
    sols = list(iter_solve(eqs, theory))
    return sols, None if sols else "element equations unsolvable"


def minimize(unifiers: list[Substitution], domain: Iterable[Var], theory: Theory) -> list[Substitution]:
    """Drop unifiers that are checked instances of another one."""
    domain = sorted(domain, key=term_key)
    keep = list(unifiers)
    i = 0
    while i < len(keep):
        s = keep[i]
        drop = False
        for j, o in enumerate(keep):
            if j == i:
                continue
            if is_instance(o, s, domain, theory):
                # mutual instances: keep the earlier one
                if j > i and is_instance(s, o, domain, theory):
                    continue
                drop = True
                break
        if drop:
            keep.pop(i)
        else:
            i += 1
    return keep


def unify(
    problem: Problem,
    mode: str = "all",
    max_branches: int | None = None,
    trace: bool = False,
    minimal: bool = True,
) -> UnifyResult:
    """Complete unifier set (mode "all") or one nil-completed unifier (mode "decide")."""
    if mode == "decide":
        return _decide(problem, trace)
    stats = SearchStats()
    lines: list[str] | None = [] if trace else None
    result = UnifyResult(problem, [], stats=stats, bound=step_bound(problem))
    seen: set = set()
    originals = problem.original_variables
    for leaf in search(problem, max_branches, stats, lines):
        sf = solved_form(leaf.state)
        result.solved_forms.append(sf)
        sols, why = _element_solutions(sf.element_residue, problem.theory)
        if why:
            result.failures.append(why)
            if lines is not None:
                lines.append(f"{leaf.state.depth} FAIL {why}")
        for sol in sols:
            sigma = extract_unifier(sf, sol, problem)
            key = canonical_key(sigma, originals)
            if key not in seen:
                seen.add(key)
                result.unifiers.append(sigma)
    if stats.first_failure and not result.unifiers:
        result.failures.insert(0, stats.first_failure)
    elif stats.first_failure:
        result.failures.append(stats.first_failure)
    if minimal and len(result.unifiers) > 1:
        result.unifiers = minimize(result.unifiers, originals, problem.theory)
    result.trace = lines or []
    return result


def _decide(problem: Problem, trace: bool) -> UnifyResult:
    stats = SearchStats()
    result = UnifyResult(problem, [], stats=stats, bound=step_bound(problem))
    events: list = []
    try:
        state = saturate(initial_state(problem), problem.theory, events)
    except Failure as f:
        result.failures.append(str(f))
        result.trace = [str(e) for e in events] + [f"0 FAIL {f}"] if trace else []
        return result
    stats.max_push = push_count(state)
    result.trace = [str(e) for e in events] if trace else []
    view = View(state)
    live = view.nonnil
    kept = [e for e in state.equations if e.is_list and e.lhs in live]
    nils = sorted(
        {v for e in state.equations if e.is_list for v in e.variables() if v.sort is Sort.LIST} - live,
        key=term_key,
    )
    list_part = tuple(sorted(kept)) + tuple(Equation(v, NIL) for v in nils)
    sf = SolvedForm(list_part, tuple(sorted(e for e in state.equations if not e.is_list)), True)
    result.solved_forms.append(sf)
    sols, why = _element_solutions(sf.element_residue, problem.theory)
    if why:
        result.failures.append(why)
        return result
    result.unifiers.append(extract_unifier(sf, sols[0], problem))
    return result


def unify_terms(
    pairs: Iterable[tuple[Term, Term]], theory: Theory | str, constants: Iterable[str] = (), **kw
) -> UnifyResult:
    from .standard import to_standard_form

    th = theory if isinstance(theory, Theory) else Theory.parse(theory)
    return unify(to_standard_form(list(pairs), th, constants), **kw)
