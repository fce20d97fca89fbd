"""Concrete syntax for programs and queries.

Programs are Prolog-like::

    p(X,Y) :- p(X,Z), e(Z,Y).
    p(X,Y) :- e(X,Y), not r.     % `\\+ r` is accepted too
    e(a,b).

Queries are a single positive atom, ``?- p(a,Y).``  Identifiers starting with
an upper-case letter or ``_`` are variables; a lone ``_`` is anonymous.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .terms import (
    Atom,
    Clause,
    Compound,
    Const,
    Goal,
    Literal,
    Marker,
    Program,
    Subgoal,
    Substitution,
    Var,
)

RESERVED = {"LOOP"}
MAX_NESTING = 256


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int

    def __str__(self):
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<neck>:-)
  | (?P<query>\?-)
  | (?P<naf>\\\+)
  | (?P<ustar>u\*)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>[0-9]+)
  | (?P<punct>[(),.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    span: SourceSpan


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        span = SourceSpan(line, pos - line_start + 1)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ustar":
            raise ParseError("'u*' is reserved for engine output", span)
        if kind == "name" and chunk in RESERVED:
            raise ParseError(f"{chunk!r} is reserved for engine output", span)
        if kind != "ws":
            tokens.append(_Token(kind if kind != "punct" else chunk, chunk, span))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", SourceSpan(line, pos - line_start + 1)))
    return tokens


def _is_var_name(name: str) -> bool:
    return name[0].isupper() or name[0] == "_"


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        named = {t.text for t in self.tokens if t.kind == "name" and _is_var_name(t.text)}
        self._taken = named
        self._anon = 0
        self._depth = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, what: str) -> _Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {what}, found {found!r}", self.tok.span)
        return self.advance()

    def fresh_anonymous(self) -> Var:
        while True:
            self._anon += 1
            name = f"_G{self._anon}"
            if name not in self._taken:
                return Var(name)

    def term(self):
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Const(t.text)
        if t.kind != "name" or t.text in ("not",):
            raise ParseError(f"expected a term, found {t.text or 'end of input'!r}", t.span)
        self.advance()
        if t.text == "_":
            return self.fresh_anonymous()
        if _is_var_name(t.text):
            return Var(t.text)
        if self.tok.kind == "(":
            return Compound(t.text, self.arguments())
        return Const(t.text)

    def arguments(self) -> tuple:
        opening = self.expect("(", "'('")
        self._depth += 1
        if self._depth > MAX_NESTING:
            raise ParseError(f"terms nested deeper than {MAX_NESTING}", opening.span)
        args = [self.term()]
        while self.tok.kind == ",":
            self.advance()
            args.append(self.term())
        self.expect(")", "')' or ','")
        self._depth -= 1
        return tuple(args)

    def atom(self) -> Atom:
        t = self.tok
        if t.kind == "naf" or (t.kind == "name" and t.text == "not"):
            raise ParseError("negation may only be applied to an atom", t.span)
        if t.kind != "name":
            raise ParseError(f"expected an atom, found {t.text or 'end of input'!r}", t.span)
        if _is_var_name(t.text):
            raise ParseError(f"a variable ({t.text}) cannot be used as an atom", t.span)
        self.advance()
        args = self.arguments() if self.tok.kind == "(" else ()
        return Atom(t.text, args)

    def literal(self) -> Literal:
        t = self.tok
        if t.kind == "naf" or (t.kind == "name" and t.text == "not"):
            self.advance()
            return Literal(self.atom(), negative=True)
        return Literal(self.atom())

    def clause(self) -> Clause:
        head = self.atom()
        body = []
        if self.tok.kind == "neck":
            self.advance()
            body.append(self.literal())
            while self.tok.kind == ",":
                self.advance()
                body.append(self.literal())
        self.expect(".", "'.' at end of clause")
        return Clause(head, tuple(body))

    def program(self) -> Program:
        clauses = []
        while self.tok.kind != "eof":
            if self.tok.kind == "query":
                raise ParseError("queries are not allowed in program text", self.tok.span)
            clauses.append(self.clause())
        return Program(tuple(clauses))

    def query(self) -> Atom:
        if self.tok.kind == "query":
            self.advance()
        t = self.tok
        if t.kind == "naf" or (t.kind == "name" and t.text == "not"):
            raise ParseError("the top goal must be a positive atom", t.span)
        a = self.atom()
        if self.tok.kind == ",":
            raise ParseError("the top goal must be a single atom", self.tok.span)
        if self.tok.kind == ".":
            self.advance()
        if self.tok.kind != "eof":
            raise ParseError(f"unexpected {self.tok.text!r} after query", self.tok.span)
        return a


def parse_program(text: str) -> Program:
    return _Parser(text).program()


def parse_query(text: str) -> Goal:
    """Parse ``?- A.`` into the top goal ``<- A``."""
    a = _Parser(text).query()
    return Goal((Subgoal(Literal(a)),), (), a)


def parse_atom(text: str) -> Atom:
    return _Parser(text).query()


def render(value) -> str:
    """Text form of a term, atom, literal, clause, goal, program or substitution.

    Programs and queries round-trip through the parser.
    """
    if isinstance(value, Substitution):
        return str(value)
    if isinstance(value, (Goal, Program, Clause, Literal, Atom, Marker, Var, Const, Compound, Subgoal)):
        return str(value)
    raise TypeError(f"cannot render {type(value).__name__}")
