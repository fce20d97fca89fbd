"""The win/move game on a cycle, a chain and a mixed graph.

Each position is solved by the engine and classified by the oracle; the two
columns must agree.

    python demos/win_move.py
"""

from sltnf import ComputationRule, Engine, classify, parse_atom, parse_program, wf_model

WIN = "win(X) :- move(X,Y), not win(Y)."
EDGES = {
    "3-cycle": [("a", "b"), ("b", "c"), ("c", "a")],
    "chain": [(f"n{i}", f"n{i + 1}") for i in range(5)],
    "cycle with exit": [("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")],
}


def main() -> None:
    for board, edges in EDGES.items():
        facts = " ".join(f"move({x},{y})." for x, y in edges)
        program = parse_program(f"{WIN} {facts}")
        model = wf_model(program)
        positions = sorted({x for e in edges for x in e})
        print(f"{board}: {facts}")
        for rule in ComputationRule:
            engine = Engine(program, rule)
            row = []
            for pos in positions:
                atom = parse_atom(f"win({pos})")
                got, want = engine.solve(atom).truth, classify(model, atom).value
                row.append(f"{pos}={got}" + ("" if got == want else f" (oracle {want})"))
            print(f"  {rule.value:<24} " + "  ".join(row))


if __name__ == "__main__":
    main()
