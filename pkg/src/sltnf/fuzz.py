"""Differential testing of the engine against the alternating-fixpoint oracle.

Random ground propositional programs are generated from a seed; for every
atom of each program the engine's three-valued verdict must equal the
oracle's classification.  Generation depends only on ``(seed, case index)``,
so a reported mismatch can be replayed alone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .engine import ComputationRule, Engine, Limits
from .oracle import classify, wf_model
from .terms import Atom, Clause, Literal, Program


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 1
    cases: int = 1000
    max_atoms: int = 6
    max_clauses: int = 12
    max_body: int = 3
    negation_probability: float = 0.4
    rules: tuple = (ComputationRule.LEFTMOST, ComputationRule.LEFTMOST_POSITIVE_FIRST)
    limits: Limits = field(default_factory=Limits)


@dataclass(frozen=True)
class Mismatch:
    case: int
    program: Program
    atom: Atom
    rule: ComputationRule
    engine: str
    oracle: str

    def report(self, seed: int) -> str:
        return (
            f"mismatch in case {self.case} (seed {seed}, rule {self.rule.value}): "
            f"{self.atom} engine={self.engine} oracle={self.oracle}\n"
            f"program:\n{self.program}\n"
        )


@dataclass
class FuzzReport:
    config: FuzzConfig
    cases_run: int = 0
    atoms_checked: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def text(self) -> str:
        cfg = self.config
        lines = [
            f"fuzz: seed={cfg.seed} cases={self.cases_run} atoms={self.atoms_checked} "
            f"rules={','.join(r.value for r in cfg.rules)}"
        ]
        if self.mismatches:
            lines.append(self.mismatches[0].report(cfg.seed).rstrip("\n"))
        lines.append(f"mismatches: {len(self.mismatches)}")
        return "\n".join(lines) + "\n"


def case_rng(seed: int, case: int) -> random.Random:
    return random.Random(f"{seed}:{case}")


def random_program(
    rng: random.Random,
    max_atoms: int = 6,
    max_clauses: int = 12,
    max_body: int = 3,
    negation_probability: float = 0.4,
) -> Program:
    n_atoms = rng.randint(1, max_atoms)
    atoms = [Atom(f"p{i}") for i in range(n_atoms)]
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        head = rng.choice(atoms)
        body = tuple(
            Literal(rng.choice(atoms), negative=rng.random() < negation_probability)
            for _ in range(rng.randint(0, max_body))
        )
        clauses.append(Clause(head, body))
    return Program(tuple(clauses))


def program_atoms(program: Program) -> list[Atom]:
    seen = {}
    for c in program:
        seen[c.head] = None
        for lit in c.body:
            seen[lit.atom] = None
    return sorted(seen, key=lambda a: (a.predicate, str(a)))


def frozen_violations(history) -> list[str]:
    """Tables whose answers changed after they were marked complete."""
    frozen: dict = {}
    out = []
    for info in history:
        for key, (comp, answers) in info.tables.items():
            if key in frozen and frozen[key] != answers:
                out.append(f"table {key} grew after completion in round {info.index}")
            if comp:
                frozen.setdefault(key, answers)
    return out


def check_program(program: Program, rules, limits: Limits, case: int = 0) -> tuple[int, list]:
    """Compare engine and oracle on every atom; returns (atoms checked, mismatches)."""
    model = wf_model(program)
    engines = [Engine(program, rule, limits) for rule in rules]
    mismatches = []
    atoms = program_atoms(program)
    for a in atoms:
        expected = classify(model, a).value
        for eng in engines:
            result = eng.solve(a)
            got = result.truth
            broken = frozen_violations(result.history)
            if broken:
                got = f"invariant violated ({broken[0]})"
            if got != expected:
                mismatches.append(Mismatch(case, program, a, eng.rule, got, expected))
    return len(atoms), mismatches


def run_fuzz(config: FuzzConfig, stop_at_first: bool = True) -> FuzzReport:
    report = FuzzReport(config)
    for case in range(config.cases):
        rng = case_rng(config.seed, case)
        program = random_program(
            rng, config.max_atoms, config.max_clauses, config.max_body, config.negation_probability
        )
        checked, bad = check_program(program, config.rules, config.limits, case)
        report.cases_run += 1
        report.atoms_checked += checked
        report.mismatches.extend(bad)
        if bad and stop_at_first:
            break
    return report
