from chainunify.rewrite import normalize
from chainunify.syntax import parse
from chainunify.terms import Const, Sort, Var


def problem(body: str, theory: str = "dbc", consts: str = ""):
    decl = f"const {consts};" if consts else ""
    return parse(f"problem {theory} {{ {decl} {body} }}")


def L(name: str) -> Var:
    return Var(name, Sort.LIST)


def E(name: str) -> Var:
    return Var(name, Sort.ELEMENT)


def ground_instance(sigma, problem, names=("k1", "k2", "k3", "k4", "k5", "k6")):
    """Apply sigma, then map its remaining free variables to fresh constants or nil-free lists."""
    from chainunify.terms import NIL, App, variables

    free = set()
    for s, t in problem.source:
        free |= variables(sigma.apply(s)) | variables(sigma.apply(t))
    fresh = iter(names * 4)
    mapping = {}
    for v in sorted(free, key=lambda v: v.name):
        c = Const(next(fresh))
        mapping[v] = c if v.sort is Sort.ELEMENT else App("cons", (c, NIL))
    return mapping


def holds(sigma, problem) -> bool:
    """Every original equation holds after sigma and a fresh-constant instantiation."""
    from chainunify.terms import replace

    inst = ground_instance(sigma, problem)
    th = problem.theory
    for s, t in problem.source:
        l = normalize(replace(sigma.apply(s), inst), th, check=False)
        r = normalize(replace(sigma.apply(t), inst), th, check=False)
        if l != r:
            return False
    return True
