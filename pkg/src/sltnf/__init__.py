"""Tabled top-down evaluation of general logic programs under the well-founded semantics."""

from .engine import ComputationRule, Engine, LimitExceeded, Limits, QueryResult, Status, select, solve
from .oracle import GroundProgram, Truth, WfModel, classify, ground, wf_model
from .parser import ParseError, SourceSpan, parse_atom, parse_program, parse_query, render
from .terms import Atom, Clause, Compound, Const, Goal, Literal, Program, Substitution, Var

__all__ = [
    "Atom", "Clause", "Compound", "ComputationRule", "Const", "Engine", "Goal", "GroundProgram",
    "LimitExceeded", "Limits", "Literal", "ParseError", "Program", "QueryResult", "SourceSpan",
    "Status", "Substitution", "Truth", "Var", "WfModel", "classify", "ground", "parse_atom",
    "parse_program", "parse_query", "render", "select", "solve", "wf_model",
]
