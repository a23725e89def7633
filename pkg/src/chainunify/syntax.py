"""Concrete syntax for problem files and terms.

    problem dbc {
      const a, b;            # declared constants
      U =? db(V, x);         # upper-case: list variable, lower-case: element
      W =? [a, h(a, b)];     # list sugar for cons(a, cons(h(a, b), nil))
    }

In bc1 problems ``^`` is infix xor and ``0`` its unit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .errors import ParseError, SignatureError, SortError
from .rewrite import Theory
from .terms import NIL, SIGNATURE, ZERO, App, Const, Sort, Term, Var, make, sort_of, to_list, well_typed

FUNCTIONS = set(SIGNATURE) - {"nil"} | {"xor"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<eq>=\?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:\#[0-9]+)?|0)
  | (?P<punct>[(){}\[\],;^])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class ProblemFile:
    theory: Theory
    constants: tuple[str, ...]
    equations: tuple[tuple[Term, Term], ...]


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[_Tok]:
    out: list[_Tok] = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            out.append(_Tok(kind, m.group(), line, m.start() - start + 1))
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - start + 1))
    return out


class _Parser:
    def __init__(self, text: str, constants: Iterable[str] = ()):
        self.toks = tokenize(text)
        self.i = 0
        self.constants = set(constants)

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def next(self) -> _Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.next()

    def at(self, text: str) -> bool:
        return self.tok.text == text

    # terms

    def term(self) -> Term:
        first = self.tok
        args = [self.atom()]
        while self.at("^"):
            self.next()
            args.append(self.atom())
        if len(args) == 1:
            return args[0]
        return self._checked(first, "xor", args)

    def _checked(self, tok: _Tok, op: str, args: list[Term]) -> Term:
        t = make(op, args)
        if not well_typed(t):
            raise SortError(f"{tok.line}:{tok.col}: ill-sorted arguments to {op}")
        return t

    def atom(self) -> Term:
        tok = self.tok
        if tok.text == "(":
            self.next()
            t = self.term()
            self.expect(")")
            return t
        if tok.text == "[":
            self.next()
            items = []
            if not self.at("]"):
                items.append(self.term())
                while self.at(","):
                    self.next()
                    items.append(self.term())
            self.expect("]")
            out: Term = NIL
            for it in reversed(items):
                out = self._checked(tok, "cons", [it, out])
            return out
        if tok.kind != "ident":
            raise self.error(f"expected a term, found {tok.text or 'end of input'!r}")
        self.next()
        name = tok.text
        if self.at("("):
            if name not in FUNCTIONS:
                raise SignatureError(f"{tok.line}:{tok.col}: unknown function symbol {name!r}")
            self.next()
            args = [self.term()]
            while self.at(","):
                self.next()
                args.append(self.term())
            self.expect(")")
            if name != "xor" and len(args) != len(SIGNATURE[name][0]):
                raise self.error(f"{name} expects {len(SIGNATURE[name][0])} arguments", tok)
            return self._checked(tok, name, args)
        if name == "nil":
            return NIL
        if name == "0":
            return ZERO
        if name in self.constants:
            return Const(name)
        if name in FUNCTIONS:
            raise self.error(f"function symbol {name!r} used without arguments", tok)
        return Var(name, Sort.LIST if name[0].isupper() else Sort.ELEMENT)

    # problem files

    def decl(self) -> list[str]:
        self.expect("const")
        names = []
        while True:
            tok = self.next()
            if tok.kind != "ident" or tok.text in FUNCTIONS or tok.text == "nil":
                raise self.error(f"bad constant name {tok.text!r}", tok)
            names.append(tok.text)
            if self.at(","):
                self.next()
                continue
            self.expect(";")
            return names

    def problem(self) -> ProblemFile:
        self.expect("problem")
        tok = self.next()
        try:
            theory = Theory.parse(tok.text)
        except ValueError:
            raise self.error(f"unknown theory {tok.text!r}", tok) from None
        self.expect("{")
        consts: list[str] = []
        eqs: list[tuple[Term, Term]] = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("missing '}'")
            if self.at("const"):
                for n in self.decl():
                    if n not in consts:
                        consts.append(n)
                    self.constants.add(n)
                continue
            lhs = self.term()
            op = self.expect("=?")
            rhs = self.term()
            self.expect(";")
            if sort_of(lhs) is not sort_of(rhs):
                raise SortError(f"{op.line}:{op.col}: the two sides have different sorts")
            eqs.append((lhs, rhs))
        self.expect("}")
        if self.tok.kind != "eof":
            raise self.error("trailing input after problem")
        return ProblemFile(theory, tuple(consts), tuple(eqs))


def parse_problem_file(text: str) -> ProblemFile:
    return _Parser(text).problem()


def parse(text: str):
    """Parse a problem file and bring it into standard form."""
    from .standard import to_standard_form

    pf = parse_problem_file(text)
    return to_standard_form(pf.equations, pf.theory, pf.constants)


def parse_term(text: str, constants: Iterable[str] = ()) -> Term:
    """A single term, optionally preceded by ``const`` declarations."""
    p = _Parser(text, constants)
    while p.at("const"):
        p.constants.update(p.decl())
    t = p.term()
    if p.tok.kind != "eof":
        raise p.error("trailing input after term")
    return t


def parse_term_file(text: str) -> tuple[Term, list[str]]:
    p = _Parser(text)
    consts: list[str] = []
    while p.at("const"):
        names = p.decl()
        consts += names
        p.constants.update(names)
    t = p.term()
    if p.at(";"):
        p.next()
    if p.tok.kind != "eof":
        raise p.error("trailing input after term")
    return t, consts


# --- printing ---------------------------------------------------------------


def format_term(t: Term, fold_enc: bool = False) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.name
    if t == NIL:
        return "nil"
    if t.op == "cons":
        items = to_list(t)
        if items is not None:
            return "[" + ", ".join(format_term(a, fold_enc) for a in items) + "]"
    if t.op == "xor":
        return " ^ ".join(_xor_arg(a, fold_enc) for a in t.args)
    if fold_enc and t.op == "enc":
        inner = t.args[0]
        if isinstance(inner, App) and inner.op == "xor" and len(inner.args) == 2:
            return f"h({format_term(inner.args[0], True)}, {format_term(inner.args[1], True)})"
    return f"{t.op}(" + ", ".join(format_term(a, fold_enc) for a in t.args) + ")"


def _xor_arg(t: Term, fold_enc: bool) -> str:
    s = format_term(t, fold_enc)
    return f"({s})" if isinstance(t, App) and t.op == "xor" else s


def format_problem(pf: ProblemFile) -> str:
    lines = [f"problem {pf.theory.value} {{"]
    if pf.constants:
        lines.append("  const " + ", ".join(pf.constants) + ";")
    for s, t in pf.equations:
        lines.append(f"  {format_term(s)} =? {format_term(t)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
