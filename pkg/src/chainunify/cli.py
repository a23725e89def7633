"""Command line entry point: ``chainunify unify|normalize|encode-1in3|attack-demo``."""

from __future__ import annotations

import argparse
import json
import re
import sys
from typing import Sequence

from .engine import initial_state
from .errors import BudgetExceeded, ChainUnifyError, FormatError
from .graph import PropagationGraph
from .rewrite import Theory, equal_modulo, normalize
from .solver import UnifyResult, unify
from .standard import to_standard_form
from .syntax import ProblemFile, format_problem, format_term, parse_problem_file, parse_term, parse_term_file
from .terms import App, Const, Sort, Substitution, Var

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


# --- unify -------------------------------------------------------------------


def _bindings(result: UnifyResult, sigma: Substitution, fold: bool) -> list[tuple[str, str]]:
    return [(v.name, format_term(t, fold)) for v, t in sorted(sigma.items(), key=lambda vt: vt[0].name)]


def render_result(result: UnifyResult, fold: bool = False) -> str:
    lines = []
    if not result.unifiable:
        lines.append(f"not unifiable: {result.reason}")
        return "\n".join(lines) + "\n"
    n = len(result.unifiers)
    lines.append(f"unifiable: {n} unifier{'s' if n != 1 else ''}")
    for i, sigma in enumerate(result.unifiers, 1):
        lines.append(f"unifier {i}:")
        if not sigma:
            lines.append("  (identity)")
        for name, val in _bindings(result, sigma, fold):
            lines.append(f"  {name} := {val}")
        params = result.parameters(sigma)
        if params:
            lines.append("  parameters: " + ", ".join(v.name for v in sorted(params, key=lambda v: v.name)))
    return "\n".join(lines) + "\n"


def result_json(result: UnifyResult, fold: bool = False) -> dict:
    return {
        "theory": result.problem.theory.value,
        "unifiable": result.unifiable,
        "reason": result.reason,
        "unifiers": [
            {
                "bindings": dict(_bindings(result, s, fold)),
                "parameters": sorted(v.name for v in result.parameters(s)),
            }
            for s in result.unifiers
        ],
        "stats": {
            "branches": result.stats.branches,
            "leaves": result.stats.leaves,
            "push_steps": result.stats.max_push,
            "push_bound": result.bound,
        },
        "trace": result.trace,
    }


def cmd_unify(args) -> int:
    pf = parse_problem_file(_read(args.file))
    theory = Theory.parse(args.theory) if args.theory else pf.theory
    problem = to_standard_form(pf.equations, theory, pf.constants)
    result = unify(
        problem,
        mode="decide" if args.decide else "all",
        max_branches=args.max_branches,
        trace=args.trace,
        minimal=not args.no_minimize,
    )
    if args.json:
        print(json.dumps(result_json(result), indent=2))
    else:
        if args.trace:
            print("standard form:")
            for e in problem.equations:
                print(f"  {e}")
            print("graph:")
            for line in PropagationGraph(initial_state(problem).equations).dump():
                print(f"  {line}")
            print("trace:")
            for line in result.trace:
                print(f"  {line}")
        sys.stdout.write(render_result(result))
    return EXIT_OK if result.unifiable else EXIT_NO


# --- normalize -----------------------------------------------------------------


def cmd_normalize(args) -> int:
    term, _ = parse_term_file(_read(args.file))
    th = Theory.parse(args.theory)
    print(format_term(normalize(term, th)))
    return EXIT_OK


# --- 1-in-3 encoder --------------------------------------------------------------

_LIT = re.compile(r"[A-Za-z0-9_]+$")


def parse_clauses(text: str) -> list[tuple[str, str, str]]:
    clauses = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        lits = line.replace(",", " ").split()
        if len(lits) != 3:
            raise FormatError(f"line {n}: a clause needs exactly 3 literals, got {len(lits)}")
        for lit in lits:
            if not _LIT.match(lit):
                raise FormatError(f"line {n}: literal {lit!r} is not a positive variable")
        clauses.append(tuple(lits))
    return clauses


def gadget(xs: Sequence[str]) -> tuple:
    """g(h(g(h(g(h(a,b),x1),b),x2),b),x3) =? g(h(a,b),c)."""
    a, b, c = Const("a"), Const("b"), Const("c")
    t = App("h", (a, b))
    for i, x in enumerate(xs):
        t = App("g", (t, Var(f"x_{x}", Sort.ELEMENT)))
        if i < len(xs) - 1:
            t = App("h", (t, b))
    return t, App("g", (App("h", (a, b)), c))


def encode_1in3(clauses: Sequence[Sequence[str]]) -> ProblemFile:
    eqs = tuple(gadget(c) for c in clauses)
    return ProblemFile(Theory.DBC, ("a", "b", "c"), eqs)


def cmd_encode(args) -> int:
    print(format_problem(encode_1in3(parse_clauses(_read(args.file)))), end="")
    return EXIT_OK


# --- attack demo ---------------------------------------------------------------------

_DEMO_CONSTS = ("A", "B", "I", "m", "v", "w")
_DEMO = "bc([I, z], w) =? cons(h(I, w), [h(m, h(A, v))])"
_DEMO_EXPECTED = "m ^ h(A, v) ^ h(I, w)"
_NAMESTAMP = "bc([z, I], w) =? [h(m, v), h(I, h(m, v))]"


def attack_problem(variant: str = "first", theory: Theory = Theory.BC1) -> ProblemFile:
    text = _DEMO if variant == "first" else _NAMESTAMP
    lhs, rhs = text.split("=?")
    return ProblemFile(
        theory,
        _DEMO_CONSTS,
        ((parse_term(lhs, _DEMO_CONSTS), parse_term(rhs, _DEMO_CONSTS)),),
    )


def run_attack_demo(variant: str = "first", theory: Theory = Theory.BC1) -> tuple[int, list[str]]:
    pf = attack_problem(variant, theory)
    lines = [f"problem: {format_term(pf.equations[0][0])} =? {format_term(pf.equations[0][1])}  ({theory.value})"]
    result = unify(to_standard_form(pf.equations, theory, pf.constants))
    z = Var("z", Sort.ELEMENT)
    values = [s[z] for s in result.unifiers if z in s]
    if not values:
        lines.append(f"no unifier: {result.reason}")
        lines.append("no attack: the intruder's message is rejected")
        return EXIT_NO, lines
    fold = theory is Theory.BC1
    for val in values:
        lines.append(f"z := {format_term(val, fold)}")
    if variant == "first":
        want = parse_term(_DEMO_EXPECTED, _DEMO_CONSTS)
        ok = any(_equal(val, want, theory) for val in values)
        lines.append(f"expected z = {_DEMO_EXPECTED}")
        lines.append("PASS: attack found, m is recoverable" if ok else "FAIL: expected binding not produced")
        return (EXIT_OK if ok else EXIT_NO), lines
    # the reply to I carries z; I strips its own IV w
    leak = parse_term("m ^ v", _DEMO_CONSTS)
    w = parse_term("w", _DEMO_CONSTS)
    if theory is Theory.BC1 and any(_equal(App("xor", (val, w)), leak, theory) for val in values):
        lines.append("no attack: intruder obtains only m ⊕ v")
    else:
        lines.append("no attack: m is not recoverable")
    return EXIT_NO, lines


def _equal(s, t, theory: Theory) -> bool:
    try:
        return equal_modulo(s, t, theory)
    except ChainUnifyError:
        return False


def cmd_attack(args) -> int:
    theory = Theory.parse(args.theory)
    code, lines = run_attack_demo(args.variant, theory)
    for line in lines:
        print(line)
    return code


# --- main ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chainunify", description="Unification modulo block-chaining theories.")
    sub = p.add_subparsers(dest="command", required=True)

    u = sub.add_parser("unify", help="solve a problem file")
    u.add_argument("file", help="problem file, or - for stdin")
    mode = u.add_mutually_exclusive_group()
    mode.add_argument("--all", action="store_true", help="enumerate the complete unifier set (default)")
    mode.add_argument("--decide", action="store_true", help="decide unifiability, nil-completing one branch")
    u.add_argument("--max-branches", type=int, default=None, help="don't-know branch cap (default 10000)")
    u.add_argument("--trace", action="store_true", help="print standard form, graph and rule trace")
    u.add_argument("--json", action="store_true", help="machine-readable output")
    u.add_argument("--theory", help="override the theory named in the file")
    u.add_argument("--no-minimize", action="store_true", help="keep unifiers that are instances of others")
    u.set_defaults(func=cmd_unify)

    n = sub.add_parser("normalize", help="print the normal form of a term")
    n.add_argument("file", help="file holding one term (optional const declarations first), or -")
    n.add_argument("--theory", default="dbc", help="bc0, bc1, dbc, dbc_prime or dbc_plus (default dbc)")
    n.set_defaults(func=cmd_normalize)

    e = sub.add_parser("encode-1in3", help="encode positive 1-in-3 clauses as a dbc problem")
    e.add_argument("file", help="one clause per line, three variable names each, or -")
    e.set_defaults(func=cmd_encode)

    a = sub.add_parser("attack-demo", help="CBC namestamp attack as a bc1 unification problem")
    a.add_argument("--theory", default="bc1", help="theory to solve in (default bc1)")
    a.add_argument("--variant", choices=("first", "second"), default="first", help="block holding the namestamp")
    a.set_defaults(func=cmd_attack)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "max_branches", None) is not None and args.max_branches < 1:
        print("error: --max-branches must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ChainUnifyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
