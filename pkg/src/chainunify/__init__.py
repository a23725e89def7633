"""Unification modulo block-chaining theories (BC0, BC1, DBC)."""

from .errors import (
    BudgetExceeded,
    ChainUnifyError,
    FormatError,
    InconsistentInput,
    ParseError,
    SignatureError,
    SortError,
)
from .rewrite import Theory, equal_modulo, normalize
from .solver import UnifyResult, unify, unify_terms
from .standard import Equation, Problem, Shape, to_standard_form
from .syntax import format_term, parse, parse_problem_file, parse_term
from .terms import NIL, ZERO, App, Const, Substitution, Var

__all__ = [
    "App",
    "BudgetExceeded",
    "ChainUnifyError",
    "Const",
    "Equation",
    "FormatError",
    "InconsistentInput",
    "NIL",
    "ParseError",
    "Problem",
    "Shape",
    "SignatureError",
    "SortError",
    "Substitution",
    "Theory",
    "UnifyResult",
    "Var",
    "ZERO",
    "equal_modulo",
    "format_term",
    "normalize",
    "parse",
    "parse_problem_file",
    "parse_term",
    "to_standard_form",
    "unify",
    "unify_terms",
]
