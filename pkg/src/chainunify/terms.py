"""Sorted term algebra for the block-chaining signatures.

Terms are immutable and hashed once at construction.  ``xor`` nodes are kept
flattened and sorted; cancellation of equal pairs is left to the normalizer.
"""

from __future__ import annotations

import enum
import itertools
from typing import Iterable, Iterator, Mapping

from .errors import SortError


class Sort(enum.Enum):
    ELEMENT = "element"
    LIST = "list"


E = Sort.ELEMENT
L = Sort.LIST

# op -> (argument sorts, result sort); xor is variadic over elements
SIGNATURE: dict[str, tuple[tuple[Sort, ...], Sort]] = {
    "nil": ((), L),
    "cons": ((E, L), L),
    "bc": ((L, E), L),
    "db": ((L, E), L),
    "h": ((E, E), E),
    "g": ((E, E), E),
    "enc": ((E,), E),
    "car": ((L,), E),
    "cdr": ((L,), L),
}

ZERO_NAME = "0"


class Term:
    __slots__ = ("_hash", "_key")

    def __lt__(self, other: "Term") -> bool:
        return term_key(self) < term_key(other)

    def __repr__(self) -> str:
        from .syntax import format_term

        return format_term(self)


class Var(Term):
    __slots__ = ("name", "sort")

    def __init__(self, name: str, sort: Sort):
        self.name = name
        self.sort = sort
        self._hash = hash(("var", name, sort))
        self._key = None

    def __eq__(self, other):
        return (
            isinstance(other, Var)
            and other._hash == self._hash
            and other.name == self.name
            and other.sort is self.sort
        )

    def __hash__(self):
        return self._hash


class Const(Term):
    """Element constant.  The XOR unit is the constant named ``0``."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("const", name))
        self._key = None

    def __eq__(self, other):
        return isinstance(other, Const) and other.name == self.name

    def __hash__(self):
        return self._hash


class App(Term):
    __slots__ = ("op", "args")

    def __init__(self, op: str, args: tuple[Term, ...]):
        self.op = op
        self.args = args
        self._hash = hash((op, args))
        self._key = None

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and other._hash == self._hash
            and other.op == self.op
            and other.args == self.args
        )

    def __hash__(self):
        return self._hash


def term_key(t: Term) -> tuple:
    """Total structural order used for canonical xor ordering and tie breaks."""
    k = t._key
    if k is None:
        if isinstance(t, Var):
            k = (0, t.sort.value, t.name)
        elif isinstance(t, Const):
            k = (1, t.name)
        else:
            k = (2, t.op, tuple(term_key(a) for a in t.args))
        t._key = k
    return k


NIL = App("nil", ())
ZERO = Const(ZERO_NAME)


def lvar(name: str) -> Var:
    return Var(name, L)


def evar(name: str) -> Var:
    return Var(name, E)


def const(name: str) -> Const:
    return Const(name)


def cons(head: Term, tail: Term) -> App:
    return App("cons", (head, tail))


def bc(lst: Term, iv: Term) -> App:
    return App("bc", (lst, iv))


def db(lst: Term, iv: Term) -> App:
    return App("db", (lst, iv))


def h(x: Term, y: Term) -> App:
    return App("h", (x, y))


def g(x: Term, y: Term) -> App:
    return App("g", (x, y))


def enc(x: Term) -> App:
    return App("enc", (x,))


def car(lst: Term) -> App:
    return App("car", (lst,))


def cdr(lst: Term) -> App:
    return App("cdr", (lst,))


def xor(*args: Term) -> Term:
    """Flattened, sorted xor.  Pairs are not cancelled here."""
    flat: list[Term] = []
    for a in args:
        if isinstance(a, App) and a.op == "xor":
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    flat.sort(key=term_key)
    return App("xor", tuple(flat))


def make(op: str, args: Iterable[Term]) -> Term:
    args = tuple(args)
    if op == "xor":
        return xor(*args)
    return App(op, args)


def from_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    items = list(items)
    for item in reversed(items):
        tail = cons(item, tail)
    return tail


def to_list(t: Term) -> list[Term] | None:
    """Elements of a nil-terminated cons spine, else None."""
    out = []
    while isinstance(t, App) and t.op == "cons":
        out.append(t.args[0])
        t = t.args[1]
    return out if t == NIL else None


def sort_of(t: Term) -> Sort:
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, Const):
        return E
    if t.op == "xor":
        return E
    try:
        return SIGNATURE[t.op][1]
    except KeyError:
        raise SortError(f"unknown symbol {t.op!r}") from None


def well_typed(t: Term) -> bool:
    if isinstance(t, (Var, Const)):
        return True
    if t.op == "xor":
        return len(t.args) >= 2 and all(
            well_typed(a) and sort_of(a) is E and not (isinstance(a, App) and a.op == "xor")
            for a in t.args
        )
    sig = SIGNATURE.get(t.op)
    if sig is None or len(sig[0]) != len(t.args):
        return False
    for want, a in zip(sig[0], t.args):
        if not well_typed(a) or sort_of(a) is not want:
            return False
    return True


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def variables(t: Term) -> set[Var]:
    out: set[Var] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            out.add(s)
        elif isinstance(s, App):
            stack.extend(s.args)
    return out


def occurs(v: Var, t: Term) -> bool:
    if t == v:
        return True
    if isinstance(t, App):
        return any(occurs(v, a) for a in t.args)
    return False


def depth(t: Term) -> int:
    if isinstance(t, App) and t.args:
        return 1 + max(depth(a) for a in t.args)
    return 1


def size(t: Term) -> int:
    if isinstance(t, App):
        return 1 + sum(size(a) for a in t.args)
    return 1


def replace(t: Term, mapping: Mapping[Var, Term]) -> Term:
    """Simultaneous replacement of variables; rebuilds xor canonically."""
    if isinstance(t, Var):
        return mapping.get(t, t)
    if isinstance(t, Const) or not t.args:
        return t
    new = tuple(replace(a, mapping) for a in t.args)
    if new == t.args:
        return t
    return make(t.op, new)


class Substitution(Mapping[Var, Term]):
    """Sort-respecting substitution kept in triangular (insertion) order.

    ``apply`` is simultaneous over the bindings as written; ``resolved``
    returns the idempotent closure of a triangular binding list.
    """

    def __init__(self, bindings: Iterable[tuple[Var, Term]] | Mapping[Var, Term] = ()):
        if isinstance(bindings, Mapping):
            bindings = bindings.items()
        self._map: dict[Var, Term] = {}
        for v, t in bindings:
            if sort_of(t) is not v.sort:
                raise SortError(f"cannot bind {v.name} ({v.sort.value}) to a {sort_of(t).value}")
            self._map[v] = t

    def __getitem__(self, v: Var) -> Term:
        return self._map[v]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self._map == other._map
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __repr__(self):
        body = ", ".join(f"{v.name} := {t!r}" for v, t in self._map.items())
        return "{" + body + "}"

    def apply(self, t: Term) -> Term:
        return replace(t, self._map) if self._map else t

    def resolved(self) -> "Substitution":
        """Fully apply a triangular substitution so that it is idempotent."""
        out: dict[Var, Term] = {}
        for v in reversed(list(self._map)):
            out[v] = replace(self._map[v], out)
        items = [(v, out[v]) for v in self._map]
        # bindings earlier in the list may still be mentioned by later ones
        changed = True
        while changed:
            changed = False
            m = dict(items)
            for i, (v, t) in enumerate(items):
                t2 = replace(t, m)
                if t2 != t:
                    if occurs(v, t2):
                        raise SortError(f"cyclic substitution at {v.name}")
                    items[i] = (v, t2)
                    changed = True
        return Substitution(items)

    def compose(self, other: "Substitution") -> "Substitution":
        """``self`` then ``other``: (self.compose(other)).apply(t) == other.apply(self.apply(t))."""
        items = [(v, other.apply(t)) for v, t in self._map.items()]
        items += [(v, t) for v, t in other.items() if v not in self._map]
        return Substitution([(v, t) for v, t in items if t != v])

    def restrict(self, keep: Iterable[Var]) -> "Substitution":
        keep = set(keep)
        return Substitution([(v, t) for v, t in self._map.items() if v in keep])

    def is_idempotent(self) -> bool:
        dom = set(self._map)
        return all(not (variables(t) & dom) for t in self._map.values())


def apply_substitution(s: Substitution, t: Term) -> Term:
    return s.apply(t)


class FreshSupply:
    """Injective name supply: hint followed by a monotone counter."""

    def __init__(self, start: int = 0):
        self._counter = itertools.count(start)
        self.last = start - 1

    def fresh(self, sort: Sort, hint: str) -> Var:
        self.last = next(self._counter)
        return Var(f"{hint}#{self.last}", sort)

    def copy(self) -> "FreshSupply":
        return FreshSupply(self.last + 1)


def fresh_variable(supply: FreshSupply, sort: Sort, hint: str) -> Var:
    return supply.fresh(sort, hint)
