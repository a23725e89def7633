"""Random ground terms and the algebraic properties checked against them."""

import random

from chainunify.rewrite import Theory, equal_modulo, normalize
from chainunify.terms import NIL, ZERO, App, Const, from_list

CONSTS = [Const("a"), Const("b"), Const("c")]


def element(th: Theory, rng: random.Random, depth: int = 3):
    if depth <= 1 or rng.random() < 0.3:
        pool = CONSTS + ([ZERO] if th is Theory.BC1 else [])
        return rng.choice(pool)
    ops = ["h"] + (["g", "g"] if th.is_dbc else []) + (["xor", "enc"] if th is Theory.BC1 else [])
    op = rng.choice(ops)
    if op == "enc":
        return App("enc", (element(th, rng, depth - 1),))
    return App(op, (element(th, rng, depth - 1), element(th, rng, depth - 1)))


def twin(t, th: Theory, rng: random.Random):
    """Either t itself, a term equal to t modulo th, or an unrelated term."""
    r = rng.random()
    if r < 0.3:
        return t
    if r < 0.6:
        k = rng.choice(CONSTS)
        if th.is_dbc:
            return App("g", (App("h", (t, k)), k))
        if th is Theory.BC1:
            return App("xor", (App("xor", (t, k)), k))
        return t
    return element(th, rng)


def plain_list(th: Theory, rng: random.Random, max_len: int = 3):
    return from_list([element(th, rng) for _ in range(rng.randint(0, max_len))])


def chained_list(th: Theory, rng: random.Random, max_len: int = 3):
    """A list term that may still contain bc/db redexes."""
    t = plain_list(th, rng, max_len)
    for _ in range(rng.randint(0, 2)):
        ops = ["bc"] + (["db"] if th.is_dbc else [])
        t = App(rng.choice(ops), (t, element(th, rng, 2)))
    return t


def list_twin(t, th: Theory, rng: random.Random):
    r = rng.random()
    if r < 0.3:
        return t
    if r < 0.5 and th.is_dbc and th is not Theory.DBC_PRIME:
        k = element(th, rng, 2)
        return App("db", (App("bc", (t, k)), k))
    if r < 0.6:
        return normalize(t, th)
    return chained_list(th, rng)


def iff(p: bool, q: bool) -> bool:
    return p == q


def bc_cancels_lists(th, rng):
    t1 = chained_list(th, rng)
    t2 = list_twin(t1, th, rng)
    k = element(th, rng)
    return iff(equal_modulo(App("bc", (t1, k)), App("bc", (t2, k)), th), equal_modulo(t1, t2, th))


def bc_cancels_ivs(th, rng):
    t = chained_list(th, rng)
    k1 = element(th, rng)
    k2 = twin(k1, th, rng)
    lhs = equal_modulo(App("bc", (t, k1)), App("bc", (t, k2)), th)
    return iff(lhs, normalize(t, th) == NIL or equal_modulo(k1, k2, th))


def cons_cancel(th, rng):
    s1, t1 = element(th, rng), chained_list(th, rng)
    s2, t2 = twin(s1, th, rng), list_twin(t1, th, rng)
    lhs = equal_modulo(App("cons", (s1, t1)), App("cons", (s2, t2)), th)
    return iff(lhs, equal_modulo(s1, s2, th) and equal_modulo(t1, t2, th))


def g_left_cancel(th, rng):
    s, t1 = element(th, rng), element(th, rng)
    if rng.random() < 0.4:
        s = App("h", (element(th, rng, 2), t1))
    t2 = twin(t1, th, rng)
    return iff(equal_modulo(App("g", (s, t1)), App("g", (s, t2)), th), equal_modulo(t1, t2, th))


def db_cancels_ivs(th, rng):
    t = chained_list(th, rng)
    k1 = element(th, rng)
    k2 = twin(k1, th, rng)
    lhs = equal_modulo(App("db", (t, k1)), App("db", (t, k2)), th)
    return iff(lhs, normalize(t, th) == NIL or equal_modulo(k1, k2, th))


def db_undoes_bc(rng):
    th = Theory.DBC_PRIME
    u = normalize(plain_list(th, rng), th)
    k = normalize(element(th, rng), th)
    return normalize(App("db", (App("bc", (u, k)), k)), th) == u


def h_right_cancel(rng):
    th = Theory.BC1
    s1, t = element(th, rng), element(th, rng)
    s2 = twin(s1, th, rng)
    return iff(equal_modulo(App("h", (s1, t)), App("h", (s2, t)), th), equal_modulo(s1, s2, th))


def h_left_cancel(rng):
    th = Theory.BC1
    s, t1 = element(th, rng), element(th, rng)
    t2 = twin(t1, th, rng)
    return iff(equal_modulo(App("h", (s, t1)), App("h", (s, t2)), th), equal_modulo(t1, t2, th))


PROPERTIES = {
    "bc cancels on lists, bc0": lambda r: bc_cancels_lists(Theory.BC0, r),
    "bc cancels on lists, bc1": lambda r: bc_cancels_lists(Theory.BC1, r),
    "bc cancels on ivs, bc0": lambda r: bc_cancels_ivs(Theory.BC0, r),
    "bc cancels on ivs, bc1": lambda r: bc_cancels_ivs(Theory.BC1, r),
    "cons cancellative, bc1": lambda r: cons_cancel(Theory.BC1, r),
    "cons cancellative, dbc": lambda r: cons_cancel(Theory.DBC, r),
    "g left-cancellative, dbc": lambda r: g_left_cancel(Theory.DBC, r),
    "db cancels on ivs, dbc": lambda r: db_cancels_ivs(Theory.DBC, r),
    "db undoes bc, dbc_prime": db_undoes_bc,
    "h right-cancellative, bc1": h_right_cancel,
    "h left-cancellative, bc1": h_left_cancel,
}
