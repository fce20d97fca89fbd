import networkx as nx
from hypothesis import given, settings
from hypothesis import strategies as st

from sltnf.analysis import build_dependency_graph, strongly_connected_components, tabled_predicates
from sltnf.parser import parse_program
from sltnf.terms import Atom, Clause, Literal, Program


def preds(*names):
    return frozenset((n, a) for n, a in names)


def test_p1_edges(p1):
    g = build_dependency_graph(p1)
    assert g.edges == {
        (("p", 2), ("p", 2)),
        (("p", 2), ("e", 2)),
        (("p", 2), ("r", 0)),
        (("r", 0), ("s", 0)),
        (("r", 0), ("r", 0)),
        (("s", 0), ("s", 0)),
    }


def test_p1_tabled(p1):
    assert tabled_predicates(build_dependency_graph(p1)) == preds(("p", 2), ("r", 0), ("s", 0))


def test_empty_program():
    g = build_dependency_graph(Program())
    assert not g.nodes and not g.edges
    assert tabled_predicates(g) == frozenset()


def test_single_edge():
    g = build_dependency_graph(parse_program("a :- b. b."))
    assert g.edges == {(("a", 0), ("b", 0))}
    assert tabled_predicates(g) == frozenset()


def test_two_cycle():
    g = build_dependency_graph(parse_program("a :- b. b :- a."))
    assert tabled_predicates(g) == preds(("a", 0), ("b", 0))


def test_negative_edges_count():
    g = build_dependency_graph(parse_program("w(X) :- m(X,Y), not w(Y)."))
    assert tabled_predicates(g) == preds(("w", 1))


def test_arity_keyed():
    g = build_dependency_graph(parse_program("p(X) :- p. p :- q."))
    assert tabled_predicates(g) == frozenset()


def test_successors_sorted(p1):
    g = build_dependency_graph(p1)
    assert g.successors(("p", 2)) == [("e", 2), ("p", 2), ("r", 0)]


def test_dot_marks_tabled(p1):
    g = build_dependency_graph(p1)
    dot = g.to_dot(tabled_predicates(g))
    assert '"p/2" [shape=doublecircle];' in dot
    assert '"e/2" [shape=circle];' in dot


edge_lists = st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), max_size=20)


def _program(edges) -> Program:
    return Program(tuple(Clause(Atom(f"q{a}"), (Literal(Atom(f"q{b}")),)) for a, b in edges))


@settings(max_examples=150, deadline=None)
@given(edge_lists)
def test_components_match_networkx(edges):
    g = build_dependency_graph(_program(edges))
    ref = nx.DiGraph()
    ref.add_nodes_from(g.nodes)
    ref.add_edges_from(g.edges)
    ours = sorted(map(sorted, strongly_connected_components(g)))
    theirs = sorted(map(sorted, nx.strongly_connected_components(ref)))
    assert ours == theirs


@settings(max_examples=150, deadline=None)
@given(edge_lists)
def test_tabled_iff_on_cycle(edges):
    g = build_dependency_graph(_program(edges))
    ref = nx.DiGraph(list(g.edges))
    on_cycle = {n for c in nx.strongly_connected_components(ref) for n in c
                if len(c) > 1 or ref.has_edge(n, n)}
    assert tabled_predicates(g) == on_cycle


@settings(max_examples=150, deadline=None)
@given(edge_lists, edge_lists)
def test_tabling_monotone_under_extension(edges, more):
    small = tabled_predicates(build_dependency_graph(_program(edges)))
    large = tabled_predicates(build_dependency_graph(_program(edges + more)))
    assert small <= large
