"""Normal forms modulo BC0, BC1, DBC, DBC' and the car/cdr-enlarged DBC.

All systems are convergent, so innermost rewriting reaches the unique normal
form.  In BC1, ``h(x, y)`` is expanded to ``enc(x ^ y)`` and xor nodes are
kept in canonical form (flattened, sorted, pairs cancelled, unit dropped).
"""

from __future__ import annotations

import enum
from collections import Counter

from .errors import SignatureError, SortError
from .terms import NIL, ZERO, App, Const, Term, Var, sort_of, term_key


class Theory(enum.Enum):
    BC0 = "bc0"
    BC1 = "bc1"
    DBC = "dbc"
    DBC_PRIME = "dbc_prime"
    DBC_PLUS = "dbc_plus"

    @classmethod
    def parse(cls, text: str) -> "Theory":
        key = text.strip().lower().replace("-", "_").replace("'", "_prime")
        for th in cls:
            if th.value == key:
                return th
        raise ValueError(f"unknown theory {text!r}")

    @property
    def is_dbc(self) -> bool:
        return self in (Theory.DBC, Theory.DBC_PRIME, Theory.DBC_PLUS)


_BASE = {"nil", "cons", "bc", "h"}
ALLOWED_OPS: dict[Theory, frozenset[str]] = {
    Theory.BC0: frozenset(_BASE),
    Theory.BC1: frozenset(_BASE | {"xor", "enc"}),
    Theory.DBC: frozenset(_BASE | {"db", "g"}),
    Theory.DBC_PRIME: frozenset(_BASE | {"db", "g"}),
    Theory.DBC_PLUS: frozenset(_BASE | {"db", "g", "car", "cdr"}),
}


def check_signature(t: Term, th: Theory) -> None:
    allowed = ALLOWED_OPS[th]
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, App):
            if s.op not in allowed:
                raise SignatureError(f"symbol {s.op!r} is not part of theory {th.value}")
            stack.extend(s.args)
        elif isinstance(s, Const) and s == ZERO and th is not Theory.BC1:
            raise SignatureError("the xor unit 0 only exists in bc1")


def xor_canonical(*args: Term) -> Term:
    """Flatten, cancel equal pairs, drop the unit, sort; collapse 0/1-ary results."""
    counts: Counter[Term] = Counter()
    for a in args:
        if isinstance(a, App) and a.op == "xor":
            counts.update(a.args)
        elif a != ZERO:
            counts[a] += 1
    kept = sorted((t for t, n in counts.items() if n % 2), key=term_key)
    if not kept:
        return ZERO
    if len(kept) == 1:
        return kept[0]
    return App("xor", tuple(kept))


class _Normalizer:
    def __init__(self, th: Theory):
        self.th = th
        self.steps = 0
        self.memo: dict[Term, Term] = {}

    def nf(self, t: Term) -> Term:
        if isinstance(t, (Var, Const)):
            return t
        if not t.args:
            return t
        hit = self.memo.get(t)
        if hit is not None:
            return hit
        out = self.root(t.op, tuple(self.nf(a) for a in t.args))
        self.memo[t] = out
        return out

    def root(self, op: str, args: tuple[Term, ...]) -> Term:
        """Normal form of op(args) where every arg is already normal."""
        th = self.th
        if op == "xor":
            return xor_canonical(*args)
        if op == "h" and th is Theory.BC1:
            self.steps += 1
            return App("enc", (xor_canonical(*args),))
        if op == "bc":
            lst, iv = args
            if lst == NIL:
                self.steps += 1
                return NIL
            if isinstance(lst, App) and lst.op == "cons":
                self.steps += 1
                head = self.root("h", (lst.args[0], iv))
                return App("cons", (head, self.root("bc", (lst.args[1], head))))
        elif op == "db":
            lst, iv = args
            if lst == NIL:
                self.steps += 1
                return NIL
            if isinstance(lst, App):
                if (
                    lst.op == "bc"
                    and th is not Theory.DBC_PRIME
                    and lst.args[1] == iv
                ):
                    self.steps += 1
                    return lst.args[0]
                if lst.op == "cons":
                    self.steps += 1
                    x, rest = lst.args
                    return App("cons", (self.root("g", (x, iv)), self.root("db", (rest, x))))
        elif op == "g":
            x, y = args
            if isinstance(x, App) and x.op == "h" and x.args[1] == y:
                self.steps += 1
                return x.args[0]
        elif op in ("car", "cdr"):
            (lst,) = args
            if isinstance(lst, App) and lst.op == "cons":
                self.steps += 1
                return lst.args[0] if op == "car" else lst.args[1]
        return App(op, args)


def normalize(t: Term, th: Theory, *, check: bool = True) -> Term:
    if check:
        check_signature(t, th)
    return _Normalizer(th).nf(t)


def normalize_counted(t: Term, th: Theory) -> tuple[Term, int]:
    """Normal form plus the number of rewrite steps taken."""
    check_signature(t, th)
    n = _Normalizer(th)
    out = n.nf(t)
    return out, n.steps


def equal_modulo(s: Term, t: Term, th: Theory) -> bool:
    if sort_of(s) is not sort_of(t):
        raise SortError("cannot compare terms of different sorts")
    if s == t:
        return True
    n = _Normalizer(th)
    check_signature(s, th)
    check_signature(t, th)
    return n.nf(s) == n.nf(t)


# --- single-step rewriting, used to cross-check the fast normalizer ---------


def _step_at_root(t: App, th: Theory) -> Term | None:
    op, args = t.op, t.args
    if op == "h" and th is Theory.BC1:
        return App("enc", (xor_canonical(*args),))
    if op == "bc":
        lst, iv = args
        if lst == NIL:
            return NIL
        if isinstance(lst, App) and lst.op == "cons":
            head = App("h", (lst.args[0], iv))
            return App("cons", (head, App("bc", (lst.args[1], head))))
    if op == "db" and th.is_dbc:
        lst, iv = args
        if lst == NIL:
            return NIL
        if isinstance(lst, App):
            if lst.op == "bc" and th is not Theory.DBC_PRIME and lst.args[1] == iv:
                return lst.args[0]
            if lst.op == "cons":
                x, rest = lst.args
                return App("cons", (App("g", (x, iv)), App("db", (rest, x))))
    if op == "g" and th.is_dbc:
        x, y = args
        if isinstance(x, App) and x.op == "h" and x.args[1] == y:
            return x.args[0]
    if op in ("car", "cdr") and th is Theory.DBC_PLUS:
        (lst,) = args
        if isinstance(lst, App) and lst.op == "cons":
            return lst.args[0] if op == "car" else lst.args[1]
    return None


def _canon(t: Term) -> Term:
    if isinstance(t, App) and t.args:
        args = tuple(_canon(a) for a in t.args)
        if t.op == "xor":
            return xor_canonical(*args)
        return App(t.op, args)
    return t


def _innermost_redexes(t: Term, th: Theory, path=()) -> list[tuple]:
    """Paths of innermost redexes in pre-order (left to right)."""
    if not isinstance(t, App) or not t.args:
        return []
    below = []
    for i, a in enumerate(t.args):
        below.extend(_innermost_redexes(a, th, path + (i,)))
    if below:
        return below
    return [path] if _step_at_root(t, th) is not None else []


def _rewrite_at(t: Term, path: tuple, th: Theory) -> Term:
    if not path:
        out = _step_at_root(t, th)
        assert out is not None
        return out
    i = path[0]
    args = list(t.args)
    args[i] = _rewrite_at(args[i], path[1:], th)
    return App(t.op, tuple(args))


def normalize_stepwise(t: Term, th: Theory, strategy: str = "leftmost", max_steps: int = 100_000) -> tuple[Term, int]:
    """Innermost one-step-at-a-time rewriting; returns (normal form, steps)."""
    check_signature(t, th)
    t = _canon(t)
    steps = 0
    while True:
        redexes = _innermost_redexes(t, th)
        if not redexes:
            return t, steps
        pos = redexes[0] if strategy == "leftmost" else redexes[-1]
        t = _canon(_rewrite_at(t, pos, th))
        steps += 1
        if steps > max_steps:
            raise RuntimeError("rewriting did not terminate within the step bound")
