"""First-order syntax: terms, atoms, literals, clauses, goals and substitutions.

All values are immutable. Variables are identified by name; a name that starts
with an upper-case letter or an underscore is a variable everywhere in this
package (parser, renderer, canonical keys).
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from functools import cached_property
from typing import Union


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be non-empty")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    symbol: str

    def __post_init__(self):
        if not self.symbol:
            raise ValueError("constant symbol must be non-empty")

    def __str__(self):
        return self.symbol


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple

    def __post_init__(self):
        if not self.functor:
            raise ValueError("functor must be non-empty")
        if not self.args:
            raise ValueError("compound terms need at least one argument")
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self):
        return f"{self.functor}({','.join(map(str, self.args))})"


Term = Union[Var, Const, Compound]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple = ()

    def __post_init__(self):
        if not self.predicate:
            raise ValueError("predicate symbol must be non-empty")
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def indicator(self) -> tuple[str, int]:
        """The ``(name, arity)`` pair identifying the predicate symbol."""
        return (self.predicate, len(self.args))

    @cached_property
    def variables(self) -> tuple[Var, ...]:
        """Distinct variables in left-to-right, depth-first order."""
        seen: dict[Var, None] = {}
        for arg in self.args:
            for v in term_variables(arg):
                seen.setdefault(v, None)
        return tuple(seen)

    @property
    def is_ground(self) -> bool:
        return not self.variables

    def __str__(self):
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(map(str, self.args))})"


@dataclass(frozen=True)
class Literal:
    """A positive or negative body literal."""

    atom: Atom
    negative: bool = False

    @property
    def positive(self) -> bool:
        return not self.negative

    def __str__(self):
        return f"not {self.atom}" if self.negative else str(self.atom)


@dataclass(frozen=True)
class Marker:
    """Engine-only pseudo-literal: ``u*`` or ``LOOP``. Never parsed."""

    name: str

    def __str__(self):
        return self.name


USTAR = Marker("u*")
LOOP = Marker("LOOP")

GoalLiteral = Union[Literal, Marker]


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        for lit in self.body:
            if not isinstance(lit, Literal):
                raise ValueError(f"clause bodies hold literals only, got {lit!r}")

    @cached_property
    def variables(self) -> tuple[Var, ...]:
        seen = dict.fromkeys(self.head.variables)
        for lit in self.body:
            for v in lit.atom.variables:
                seen.setdefault(v, None)
        return tuple(seen)

    def __str__(self):
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(map(str, self.body))}."


@dataclass(frozen=True)
class Program:
    clauses: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def __len__(self):
        return len(self.clauses)

    def __str__(self):
        return "\n".join(map(str, self.clauses))


@dataclass(frozen=True)
class Subgoal:
    """A literal inside a goal together with its ancestor subgoals.

    ``ancestors`` lists ``(node id, selected atom)`` for every positive subgoal
    whose resolution produced this literal, outermost first.
    """

    literal: GoalLiteral
    ancestors: tuple = ()

    def __str__(self):
        return str(self.literal)


@dataclass(frozen=True)
class Frame:
    """An open call frame for a selected tabled subgoal.

    ``atom`` is the subgoal instantiated by every binding made since it was
    selected; when the frame closes it is the answer.  ``tainted`` records
    that a ``u*`` was introduced by a literal belonging to the frame.
    """

    node: int
    subgoal: Atom
    atom: Atom
    tainted: bool = False


@dataclass(frozen=True)
class Goal:
    items: tuple = ()
    frames: tuple = ()
    query: Atom | None = None

    @classmethod
    def of(cls, *literals: GoalLiteral | Atom, query: Atom | None = None) -> Goal:
        items = tuple(
            Subgoal(Literal(lit) if isinstance(lit, Atom) else lit) for lit in literals
        )
        return cls(items, (), query)

    @property
    def literals(self) -> tuple[GoalLiteral, ...]:
        return tuple(sg.literal for sg in self.items)

    def __len__(self):
        return len(self.items)

    def __str__(self):
        return ", ".join(str(sg.literal) for sg in self.items)


def term_variables(t: Term) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Compound):
        for a in t.args:
            yield from term_variables(a)


def is_ground_term(t: Term) -> bool:
    return next(term_variables(t), None) is None


def term_size(t: Term) -> int:
    """Number of symbol occurrences: 1 per variable, constant, or functor."""
    if isinstance(t, Compound):
        return 1 + sum(term_size(a) for a in t.args)
    return 1


def atom_size(a: Atom) -> int:
    """Largest argument size of ``a`` (0 for propositions)."""
    return max((term_size(t) for t in a.args), default=0)


class Substitution(Mapping):
    """A finite map from variables to terms.

    Application is simultaneous: ``{X: g(Y), Y: b}`` maps ``f(X)`` to
    ``f(g(Y))``.  Identity bindings are dropped on construction.
    """

    __slots__ = ("_bindings", "_hash")

    def __init__(self, bindings: Mapping[Var, Term] | Iterable[tuple[Var, Term]] = ()):
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        self._bindings = {v: t for v, t in items if v != t}
        self._hash = None

    def __getitem__(self, v: Var) -> Term:
        return self._bindings[v]

    def __iter__(self):
        return iter(self._bindings)

    def __len__(self):
        return len(self._bindings)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._bindings.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self._bindings == other._bindings
        return NotImplemented

    def __repr__(self):
        inner = ", ".join(f"{v}: {t}" for v, t in self._bindings.items())
        return f"Substitution({{{inner}}})"

    def __str__(self):
        return ", ".join(f"{v} = {t}" for v, t in self._bindings.items())

    def compose(self, other: Substitution) -> Substitution:
        """``self`` followed by ``other``: apply ``other`` to our range, then merge."""
        out = {v: apply(t, other) for v, t in self._bindings.items()}
        for v, t in other.items():
            out.setdefault(v, t)
        return Substitution(out)

    def restrict(self, variables: Iterable[Var]) -> Substitution:
        keep = set(variables)
        return Substitution((v, t) for v, t in self._bindings.items() if v in keep)

    def is_idempotent(self) -> bool:
        dom = set(self._bindings)
        return not any(
            v in dom for t in self._bindings.values() for v in term_variables(t)
        )


EMPTY = Substitution()


def apply(x, theta: Mapping):
    """Apply ``theta`` to a term, atom, literal, marker, subgoal, goal or clause."""
    if not theta:
        return x
    if isinstance(x, Var):
        return theta.get(x, x)
    if isinstance(x, Const):
        return x
    if isinstance(x, Compound):
        return Compound(x.functor, tuple(apply(a, theta) for a in x.args))
    if isinstance(x, Atom):
        if not x.variables:
            return x
        return Atom(x.predicate, tuple(apply(a, theta) for a in x.args))
    if isinstance(x, Literal):
        return Literal(apply(x.atom, theta), x.negative)
    if isinstance(x, Marker):
        return x
    if isinstance(x, Subgoal):
        return Subgoal(apply(x.literal, theta), x.ancestors)
    if isinstance(x, Frame):
        return Frame(x.node, x.subgoal, apply(x.atom, theta), x.tainted)
    if isinstance(x, Goal):
        return Goal(
            tuple(apply(sg, theta) for sg in x.items),
            tuple(apply(f, theta) for f in x.frames),
            None if x.query is None else apply(x.query, theta),
        )
    if isinstance(x, Clause):
        return Clause(apply(x.head, theta), tuple(apply(b, theta) for b in x.body))
    raise TypeError(f"cannot apply a substitution to {type(x).__name__}")


def _occurs(v: Var, t: Term) -> bool:
    if t == v:
        return True
    if isinstance(t, Compound):
        return any(_occurs(v, a) for a in t.args)
    return False


def unify_terms(pairs: Iterable[tuple[Term, Term]], occurs_check: bool = True) -> Substitution | None:
    """Most general unifier of a system of term equations, or ``None``.

    Bindings are composed eagerly, so the result is idempotent.
    """
    bindings: dict[Var, Term] = {}
    stack = list(pairs)
    while stack:
        s, t = stack.pop()
        if bindings:
            s, t = apply(s, bindings), apply(t, bindings)
        if s == t:
            continue
        if isinstance(t, Var) and not isinstance(s, Var):
            s, t = t, s
        if isinstance(s, Var):
            if occurs_check and _occurs(s, t):
                return None
            step = {s: t}
            for v in bindings:
                bindings[v] = apply(bindings[v], step)
            bindings[s] = t
            continue
        if isinstance(s, Const) or isinstance(t, Const):
            return None
        if s.functor != t.functor or len(s.args) != len(t.args):
            return None
        stack.extend(zip(s.args, t.args))
    return Substitution(bindings)


def mgu(a: Atom, b: Atom, occurs_check: bool = True) -> Substitution | None:
    """Most general unifier of two atoms, or ``None`` if they do not unify."""
    if a.predicate != b.predicate or len(a.args) != len(b.args):
        return None
    if not a.args:
        return EMPTY
    return unify_terms(zip(a.args, b.args), occurs_check)


def match(pattern: Atom, target: Atom) -> Substitution | None:
    """One-way matching: a substitution on ``pattern``'s variables only.

    Succeeds iff ``target`` is an instance of ``pattern``.
    """
    if pattern.indicator != target.indicator:
        return None
    bindings: dict[Var, Term] = {}
    stack = list(zip(pattern.args, target.args))
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            bound = bindings.get(p)
            if bound is None:
                bindings[p] = t
            elif bound != t:
                return None
        elif isinstance(p, Const):
            if p != t:
                return None
        else:
            if not isinstance(t, Compound) or p.functor != t.functor or len(p.args) != len(t.args):
                return None
            stack.extend(zip(p.args, t.args))
    return Substitution(bindings)


def is_instance(general: Atom, specific: Atom) -> bool:
    return match(general, specific) is not None


def is_variant(a: Atom, b: Atom) -> bool:
    """True iff a bijective variable renaming maps ``a`` onto ``b``."""
    if a.indicator != b.indicator:
        return False
    forward: dict[Var, Var] = {}
    backward: dict[Var, Var] = {}
    stack = list(zip(a.args, b.args))
    while stack:
        s, t = stack.pop()
        if isinstance(s, Var):
            if not isinstance(t, Var):
                return False
            if forward.setdefault(s, t) != t or backward.setdefault(t, s) != s:
                return False
        elif isinstance(s, Const):
            if s != t:
                return False
        else:
            if not isinstance(t, Compound) or s.functor != t.functor or len(s.args) != len(t.args):
                return False
            stack.extend(zip(s.args, t.args))
    return True


def canonical_key(a: Atom) -> str:
    """A string shared by exactly the variants of ``a``.

    Variables are renamed ``_0, _1, ...`` by first occurrence, left to right.
    """
    if not a.variables:
        return str(a)
    numbering = {v: Var(f"_{i}") for i, v in enumerate(a.variables)}
    return str(apply(a, numbering))


def _fresh_name(base: str, taken: set[str]) -> str:
    stem = base.rstrip("0123456789") or base
    k = 1
    while f"{stem}{k}" in taken:
        k += 1
    return f"{stem}{k}"


def rename_apart(c: Clause, avoid: Iterable[Var]) -> Clause:
    """A variant of ``c`` sharing no variable with ``avoid``."""
    clause_vars = c.variables
    if not clause_vars:
        return c
    avoid_names = {v.name for v in avoid}
    if not avoid_names.intersection(v.name for v in clause_vars):
        return c
    taken = avoid_names | {v.name for v in clause_vars}
    renaming = {}
    for v in clause_vars:
        if v.name in avoid_names:
            fresh = _fresh_name(v.name, taken)
            taken.add(fresh)
            renaming[v] = Var(fresh)
    return apply(c, renaming)


def goal_variables(g: Goal) -> set[Var]:
    """Variables that a clause must be renamed away from when resolving ``g``."""
    out: set[Var] = set()
    for sg in g.items:
        if isinstance(sg.literal, Literal):
            out.update(sg.literal.atom.variables)
    for f in g.frames:
        out.update(f.atom.variables)
    if g.query is not None:
        out.update(g.query.variables)
    return out

