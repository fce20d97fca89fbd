"""Command-line front end.

    sltnf --program p1.pl --query "?- p(a,Y)."
    sltnf --program p1.pl --oracle
    sltnf --fuzz --seed 1 --cases 1000

Exit status: 0 for a true/false/undefined verdict (or a clean fuzz run), 1 for
parse/usage errors or fuzz mismatches, 2 when the query flounders, 3 when a
resource limit is exceeded.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field

from .analysis import build_dependency_graph, tabled_predicates
from .engine import TRACE, ComputationRule, Engine, Limits, Status
from .fuzz import FuzzConfig, run_fuzz
from .oracle import GroundingError, classify, wf_model
from .parser import ParseError, parse_atom, parse_program
from .terms import is_instance
from .trees import dump_tree

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FLOUNDERED = 2
EXIT_LIMIT = 3


@dataclass(frozen=True)
class FuzzSettings:
    seed: int = 1
    cases: int = 1000
    max_atoms: int = 6
    max_clauses: int = 12
    max_body: int = 3
    negation_probability: float = 0.4


@dataclass(frozen=True)
class RunConfig:
    program_path: str | None = None
    query: str | None = None
    rule: ComputationRule = ComputationRule.LEFTMOST
    limits: Limits = field(default_factory=Limits)
    dump_trees: str | None = None
    dump_tables: bool = False
    dump_graph: str | None = None
    oracle_check: bool = False
    fuzz: FuzzSettings | None = None

    def __post_init__(self):
        if self.fuzz is not None and self.query is not None:
            raise ValueError("--query and --fuzz are mutually exclusive")


def _rule(text: str) -> ComputationRule:
    try:
        return ComputationRule.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown rule {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sltnf",
        description="Tabled evaluation of general logic programs under the well-founded semantics.",
    )
    p.add_argument("--program", metavar="PATH", help="program file")
    p.add_argument("--query", metavar="GOAL", help='atomic query, e.g. "?- p(a,Y)."')
    p.add_argument("--rule", type=_rule, default=ComputationRule.LEFTMOST,
                   metavar="leftmost|positive-first", help="computation rule (default: leftmost)")
    p.add_argument("--dump-trees", metavar="PATH", help="write every round's generalized tree as DOT")
    p.add_argument("--dump-tables", action="store_true", help="print the final table store")
    p.add_argument("--dump-graph", metavar="PATH", help="write the predicate dependency graph as DOT")
    p.add_argument("--oracle", action="store_true",
                   help="print the well-founded model (with --query: the oracle's verdict)")
    p.add_argument("--fuzz", action="store_true", help="run the differential fuzzer")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--max-atoms", type=int, default=6)
    p.add_argument("--max-clauses", type=int, default=12)
    p.add_argument("--max-body", type=int, default=3)
    p.add_argument("--negation-probability", type=float, default=0.4)
    defaults = Limits()
    p.add_argument("--max-term-size", type=int, default=defaults.max_term_size)
    p.add_argument("--max-nodes", type=int, default=defaults.max_nodes_per_tree)
    p.add_argument("--max-depth", type=int, default=defaults.max_tree_depth_chain)
    p.add_argument("--max-iterations", type=int, default=defaults.max_iterations)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    limits = Limits(ns.max_term_size, ns.max_nodes, ns.max_depth, ns.max_iterations)
    fuzz = None
    if ns.fuzz:
        fuzz = FuzzSettings(ns.seed, ns.cases, ns.max_atoms, ns.max_clauses, ns.max_body,
                            ns.negation_probability)
    return RunConfig(ns.program, ns.query, ns.rule, limits, ns.dump_trees, ns.dump_tables,
                     ns.dump_graph, ns.oracle, fuzz)


def _configure_logging() -> None:
    level = os.environ.get("SLTNF_LOG", "").lower()
    if level in ("debug", "trace"):
        logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(message)s")
        logging.getLogger("sltnf").setLevel(logging.DEBUG if level == "debug" else TRACE)


def run_fuzz_mode(cfg: RunConfig, out) -> int:
    f = cfg.fuzz
    report = run_fuzz(FuzzConfig(
        seed=f.seed, cases=f.cases, max_atoms=f.max_atoms, max_clauses=f.max_clauses,
        max_body=f.max_body, negation_probability=f.negation_probability, limits=cfg.limits,
    ))
    out.write(report.text())
    return EXIT_OK if report.ok else EXIT_ERROR


def _print_model(program, out) -> None:
    model = wf_model(program)
    for name, atoms in (("true", model.true_atoms), ("false", model.false_atoms),
                        ("undefined", model.undefined_atoms)):
        out.write(f"{name}: {', '.join(sorted(map(str, atoms)))}\n")


def run_query(cfg: RunConfig, out, err) -> int:
    try:
        with open(cfg.program_path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        err.write(f"error: cannot read {cfg.program_path}: {exc.strerror}\n")
        return EXIT_ERROR
    try:
        program = parse_program(text)
    except ParseError as exc:
        err.write(f"error: {cfg.program_path}:{exc.span}: {exc.message}\n")
        return EXIT_ERROR
    query = None
    if cfg.query is not None:
        try:
            query = parse_atom(cfg.query)
        except ParseError as exc:
            err.write(f"error: query:{exc.span}: {exc.message}\n")
            return EXIT_ERROR

    if cfg.dump_graph:
        graph = build_dependency_graph(program)
        with open(cfg.dump_graph, "w", encoding="utf-8") as fh:
            fh.write(graph.to_dot(tabled_predicates(graph)))

    if query is None:
        if cfg.oracle_check:
            try:
                _print_model(program, out)
            except GroundingError as exc:
                err.write(f"error: oracle: {exc}\n")
                return EXIT_ERROR
            return EXIT_OK
        if cfg.dump_graph:
            return EXIT_OK
        err.write("error: nothing to do (give --query, --oracle or --fuzz)\n")
        return EXIT_ERROR

    engine = Engine(program, cfg.rule, cfg.limits, retain_trees=bool(cfg.dump_trees))
    result = engine.solve(query)

    for theta in result.answers:
        if theta:
            out.write(f"{theta}\n")
    if result.answers:
        n = len(result.answers)
        out.write(f"true ({n} answer{'s' if n != 1 else ''}, {result.iterations} iteration"
                  f"{'s' if result.iterations != 1 else ''})\n")
    else:
        out.write(f"{result.truth}\n")
    if result.status is Status.LIMIT_EXCEEDED and result.reason:
        err.write(f"limit: {result.reason}\n")

    if cfg.oracle_check:
        try:
            model = wf_model(program)
        except GroundingError as exc:
            err.write(f"error: oracle: {exc}\n")
            return EXIT_ERROR
        if query.is_ground:
            out.write(f"oracle: {classify(model, query).value}\n")
        else:
            true = sorted(str(a) for a in model.true_atoms if is_instance(query, a))
            out.write(f"oracle: {len(true)} true instance{'s' if len(true) != 1 else ''}\n")

    if cfg.dump_tables:
        out.write(result.store.dump())

    if cfg.dump_trees:
        with open(cfg.dump_trees, "w", encoding="utf-8") as fh:
            for info in result.history:
                if info.forest is not None:
                    fh.write(dump_tree(info.forest, f"round{info.index}"))

    if result.status is Status.FLOUNDERED:
        return EXIT_FLOUNDERED
    if result.status is Status.LIMIT_EXCEEDED:
        return EXIT_LIMIT
    return EXIT_OK


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    ns = parser.parse_args(argv)
    _configure_logging()
    if ns.fuzz and ns.query is not None:
        err.write("error: --query and --fuzz are mutually exclusive\n")
        return EXIT_ERROR
    try:
        cfg = config_from_args(ns)
    except ValueError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_ERROR
    if cfg.fuzz is not None:
        return run_fuzz_mode(cfg, out)
    if cfg.program_path is None:
        err.write("error: --program is required\n")
        return EXIT_ERROR
    return run_query(cfg, out, err)


if __name__ == "__main__":
    sys.exit(main())
