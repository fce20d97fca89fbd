import io
import subprocess
import sys

import pydot
import pytest

from conftest import P1_PATH
from sltnf.cli import EXIT_ERROR, EXIT_FLOUNDERED, EXIT_LIMIT, EXIT_OK, RunConfig, build_parser, config_from_args, main
from sltnf.engine import ComputationRule


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, text, name="prog.pl"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_p1_query():
    code, out, _ = cli("--program", str(P1_PATH), "--query", "?- p(a,Y).")
    assert code == EXIT_OK
    assert out.splitlines() == ["Y = b", "Y = c", "true (2 answers, 3 iterations)"]


def test_p1_false_and_undefined():
    assert cli("--program", str(P1_PATH), "--query", "?- r.")[:2] == (EXIT_OK, "false\n")
    assert cli("--program", str(P1_PATH), "--query", "?- s.")[:2] == (EXIT_OK, "undefined\n")


def test_ground_true_prints_no_bindings(tmp_path):
    path = write(tmp_path, "e(a,b).")
    assert cli("--program", path, "--query", "e(a,b)")[1] == "true (1 answer, 1 iteration)\n"


def test_positive_first_rule():
    code, out, _ = cli("--program", str(P1_PATH), "--query", "?- p(a,Y).", "--rule", "positive-first")
    assert code == EXIT_OK and out.splitlines()[-1].startswith("true (2 answers")


def test_unknown_rule_is_usage_error():
    with pytest.raises(SystemExit) as info:
        cli("--program", str(P1_PATH), "--query", "p(a,Y)", "--rule", "random")
    assert info.value.code == 2


def test_flounder_exit(tmp_path):
    path = write(tmp_path, "p(X) :- not q(X). q(a).")
    code, out, _ = cli("--program", path, "--query", "?- p(Y).")
    assert (code, out) == (EXIT_FLOUNDERED, "floundered\n")


def test_limit_exit(tmp_path):
    path = write(tmp_path, "nat(0). nat(s(X)) :- nat(X).")
    code, out, err = cli("--program", path, "--query", "nat(Y)", "--max-iterations", "3")
    assert code == EXIT_LIMIT
    assert out == "limit exceeded\n"
    assert "limit:" in err


def test_parse_error_has_span(tmp_path):
    path = write(tmp_path, "p(a).\nq(X :- p(X).")
    code, out, err = cli("--program", path, "--query", "q(Y)")
    assert code == EXIT_ERROR and out == ""
    assert f"{path}:2:" in err


def test_query_parse_error():
    code, _, err = cli("--program", str(P1_PATH), "--query", "?- not p(a,Y).")
    assert code == EXIT_ERROR and err.startswith("error: query:1:")


def test_missing_file(tmp_path):
    code, _, err = cli("--program", str(tmp_path / "nope.pl"), "--query", "p")
    assert code == EXIT_ERROR and "cannot read" in err


def test_program_required():
    assert cli("--query", "p")[0] == EXIT_ERROR


def test_nothing_to_do():
    assert cli("--program", str(P1_PATH))[0] == EXIT_ERROR


def test_oracle_model():
    code, out, _ = cli("--program", str(P1_PATH), "--oracle")
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0] == "true: e(a,b), e(b,c), p(a,b), p(a,c), p(b,c)"
    assert lines[2] == "undefined: s"


def test_oracle_with_query():
    out = cli("--program", str(P1_PATH), "--query", "s", "--oracle")[1]
    assert out.splitlines() == ["undefined", "oracle: undefined"]
    out = cli("--program", str(P1_PATH), "--query", "p(a,Y)", "--oracle")[1]
    assert out.splitlines()[-1] == "oracle: 2 true instances"


def test_oracle_rejects_function_symbols(tmp_path):
    path = write(tmp_path, "nat(0). nat(s(X)) :- nat(X).")
    code, _, err = cli("--program", path, "--oracle")
    assert code == EXIT_ERROR and "oracle" in err


def test_dump_tables():
    out = cli("--program", str(P1_PATH), "--query", "p(a,Y)", "--dump-tables")[1]
    assert "p(a,Y): comp=1 ans={p(a,b), p(a,c)}" in out
    assert "r: comp=1 ans={}" in out
    assert "s: comp=0 ans={}" in out


def test_dump_trees_valid_dot(tmp_path):
    target = tmp_path / "trees.dot"
    code, out, _ = cli("--program", str(P1_PATH), "--query", "p(a,Y)", "--dump-trees", str(target))
    assert code == EXIT_OK and out.splitlines()[-1] == "true (2 answers, 3 iterations)"
    graphs = pydot.graph_from_dot_data(target.read_text(encoding="utf-8"))
    assert [g.get_name() for g in graphs] == ['"round0"', '"round1"', '"round2"']
    assert len(graphs[0].get_subgraphs()) == 3


def test_dump_graph(tmp_path):
    target = tmp_path / "deps.dot"
    assert cli("--program", str(P1_PATH), "--dump-graph", str(target))[0] == EXIT_OK
    (graph,) = pydot.graph_from_dot_data(target.read_text(encoding="utf-8"))
    assert len(graph.get_edges()) == 6


def test_fuzz_mode():
    code, out, _ = cli("--fuzz", "--seed", "1", "--cases", "25")
    assert code == EXIT_OK
    assert out.splitlines()[-1] == "mismatches: 0"


def test_fuzz_zero_cases():
    code, out, _ = cli("--fuzz", "--cases", "0")
    assert code == EXIT_OK and "cases=0" in out


def test_fuzz_report_deterministic():
    assert cli("--fuzz", "--seed", "4", "--cases", "20")[1] == cli("--fuzz", "--seed", "4", "--cases", "20")[1]


def test_fuzz_and_query_exclusive():
    code, _, err = cli("--fuzz", "--query", "p")
    assert code == EXIT_ERROR and "mutually exclusive" in err
    with pytest.raises(ValueError):
        from sltnf.cli import FuzzSettings

        RunConfig(query="p", fuzz=FuzzSettings())


def test_config_from_args():
    ns = build_parser().parse_args(["--program", "x.pl", "--query", "p", "--rule", "positive-first", "--max-nodes", "7"])
    cfg = config_from_args(ns)
    assert cfg.rule is ComputationRule.LEFTMOST_POSITIVE_FIRST
    assert cfg.limits.max_nodes_per_tree == 7
    assert cfg.fuzz is None


def test_invalid_limit_reported():
    code, _, err = cli("--program", str(P1_PATH), "--query", "p(a,Y)", "--max-nodes", "0")
    assert code == EXIT_ERROR and "max_nodes_per_tree" in err


def test_trace_logging(monkeypatch):
    monkeypatch.setenv("SLTNF_LOG", "trace")
    proc = subprocess.run(
        [sys.executable, "-m", "sltnf", "--program", str(P1_PATH), "--query", "r"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout == "false\n"
    assert "TRACE" in proc.stderr and "[select" in proc.stderr
