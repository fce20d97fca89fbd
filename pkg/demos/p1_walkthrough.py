"""Round-by-round walk through the running example program.

Prints the new answers and the tables completed after each generalized-tree
round, then writes round 0 as DOT next to this script.

    python demos/p1_walkthrough.py
"""

from pathlib import Path

from sltnf import Engine, parse_atom, parse_program
from sltnf.trees import dump_tree

HERE = Path(__file__).parent
PROGRAM = (HERE.parent / "tests" / "fixtures" / "p1.pl").read_text(encoding="utf-8")


def main() -> None:
    program = parse_program(PROGRAM)
    print(program)
    result = Engine(program, retain_trees=True).solve(parse_atom("p(a,Y)"))
    for info in result.history:
        new = ", ".join(str(a) for _, a in info.new_answers) or "none"
        done = ", ".join(info.completed) or "none"
        print(f"round {info.index}: new answers {new}; completed {done}")
    print("answers:", ", ".join(str(s) for s in result.answers))
    print("status:", result.status.value)
    out = HERE / "p1_round0.dot"
    out.write_text(dump_tree(result.history[0].forest, "round0"), encoding="utf-8")
    print(f"round 0 tree written to {out}")


if __name__ == "__main__":
    main()
