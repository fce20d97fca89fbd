"""Bottom-up well-founded model by the alternating fixpoint.

For a ground program ``P`` and a set of atoms ``S``, ``gamma(P, S)`` is the
least model of the reduct of ``P`` by ``S``: delete clauses with a negative
literal ``not B`` where ``B`` is in ``S``, then delete the remaining negative
literals.  ``gamma`` is antimonotone, so ``gamma∘gamma`` is monotone; its
least fixpoint is the set of true atoms and the complement of its greatest
fixpoint is the set of false atoms.

Only function-free programs are accepted, so grounding stays finite.
"""

from __future__ import annotations

import enum
import itertools
from collections.abc import Iterable
from dataclasses import dataclass

from .terms import Atom, Clause, Compound, Const, Program, Substitution, apply


class Truth(str, enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNDEFINED = "undefined"


class GroundingError(ValueError):
    """The program has function symbols, so its Herbrand base is infinite."""


@dataclass(frozen=True)
class GroundProgram:
    clauses: tuple
    base: frozenset

    def __post_init__(self):
        for c in self.clauses:
            if c.variables:
                raise ValueError(f"clause {c} is not ground")

    def __iter__(self):
        return iter(self.clauses)

    def __len__(self):
        return len(self.clauses)


@dataclass(frozen=True)
class WfModel:
    true_atoms: frozenset
    false_atoms: frozenset
    undefined_atoms: frozenset

    @property
    def base(self) -> frozenset:
        return self.true_atoms | self.false_atoms | self.undefined_atoms


def _constants(program: Program) -> list[Const]:
    found = {}
    for c in program:
        for a in (c.head, *(lit.atom for lit in c.body)):
            for t in a.args:
                if isinstance(t, Compound):
                    raise GroundingError(f"function symbol {t.functor} in {a}")
                if isinstance(t, Const):
                    found[t] = None
    return sorted(found, key=lambda t: t.symbol) or [Const("d")]


def ground(p: Program) -> GroundProgram:
    """All instances of ``p``'s clauses over its constants.

    A program without constants is grounded over the single constant ``d``.
    """
    consts = _constants(p)
    out = {}
    preds = {}
    for c in p:
        for a in (c.head, *(lit.atom for lit in c.body)):
            preds[a.indicator] = None
        vs = c.variables
        if not vs:
            out[c] = None
            continue
        for combo in itertools.product(consts, repeat=len(vs)):
            out[apply(c, Substitution(zip(vs, combo)))] = None
    base = frozenset(
        Atom(name, combo)
        for name, arity in preds
        for combo in itertools.product(consts, repeat=arity)
    )
    return GroundProgram(tuple(out), base)


def least_model(clauses: Iterable[Clause]) -> frozenset:
    """Least Herbrand model of ground definite clauses, by naive iteration."""
    rules = []
    for c in clauses:
        if any(lit.negative for lit in c.body):
            raise ValueError(f"least_model needs definite clauses, got {c}")
        rules.append((c.head, tuple(lit.atom for lit in c.body)))
    model: set = set()
    changed = True
    while changed:
        changed = False
        for head, body in rules:
            if head not in model and all(b in model for b in body):
                model.add(head)
                changed = True
    return frozenset(model)


def reduct(g: GroundProgram | Iterable[Clause], s: frozenset) -> list[Clause]:
    out = []
    for c in g:
        if any(lit.negative and lit.atom in s for lit in c.body):
            continue
        out.append(Clause(c.head, tuple(lit for lit in c.body if lit.positive)))
    return out


def gamma(g: GroundProgram | Iterable[Clause], s: Iterable[Atom]) -> frozenset:
    """Least model of the reduct of ``g`` by ``s``."""
    return least_model(reduct(g, frozenset(s)))


def wf_model(g: GroundProgram | Program) -> WfModel:
    if isinstance(g, Program):
        g = ground(g)
    clauses = list(g)
    true: frozenset = frozenset()
    while True:
        not_false = gamma(clauses, true)
        nxt = gamma(clauses, not_false)
        if nxt == true:
            break
        true = nxt
    base = g.base | {c.head for c in clauses}
    return WfModel(true, frozenset(base - not_false), frozenset(not_false - true))


def classify(m: WfModel, a: Atom) -> Truth:
    """Truth value of ground ``a``; atoms outside the base are false."""
    if not a.is_ground:
        raise ValueError(f"{a} is not ground")
    if a in m.true_atoms:
        return Truth.TRUE
    if a in m.undefined_atoms:
        return Truth.UNDEFINED
    return Truth.FALSE
