"""Predicate dependency graph and the tabled/non-tabled split."""

from __future__ import annotations

from dataclasses import dataclass

from .terms import Program

Predicate = tuple[str, int]


@dataclass(frozen=True)
class DependencyGraph:
    nodes: frozenset
    edges: frozenset

    def successors(self, p: Predicate) -> list[Predicate]:
        return sorted(q for (src, q) in self.edges if src == p)

    def to_dot(self, tabled: set | frozenset = frozenset()) -> str:
        lines = ["digraph dependencies {"]
        for p in sorted(self.nodes):
            shape = "doublecircle" if p in tabled else "circle"
            lines.append(f'  "{p[0]}/{p[1]}" [shape={shape}];')
        for p, q in sorted(self.edges):
            lines.append(f'  "{p[0]}/{p[1]}" -> "{q[0]}/{q[1]}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_dependency_graph(program: Program) -> DependencyGraph:
    nodes = set()
    edges = set()
    for clause in program:
        head = clause.head.indicator
        nodes.add(head)
        for lit in clause.body:
            q = lit.atom.indicator
            nodes.add(q)
            edges.add((head, q))
    return DependencyGraph(frozenset(nodes), frozenset(edges))


def strongly_connected_components(graph: DependencyGraph) -> list[frozenset]:
    """Tarjan's algorithm without recursion."""
    adjacency = {p: [] for p in graph.nodes}
    for p, q in sorted(graph.edges):
        adjacency[p].append(q)

    index: dict[Predicate, int] = {}
    low: dict[Predicate, int] = {}
    on_stack: set[Predicate] = set()
    stack: list[Predicate] = []
    components = []
    counter = 0

    for start in sorted(graph.nodes):
        if start in index:
            continue
        work = [(start, iter(adjacency[start]))]
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            node, successors = work[-1]
            advanced = False
            for q in successors:
                if q not in index:
                    index[q] = low[q] = counter
                    counter += 1
                    stack.append(q)
                    on_stack.add(q)
                    work.append((q, iter(adjacency[q])))
                    advanced = True
                    break
                if q in on_stack:
                    low[node] = min(low[node], index[q])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = set()
                while True:
                    q = stack.pop()
                    on_stack.discard(q)
                    comp.add(q)
                    if q == node:
                        break
                components.append(frozenset(comp))
    return components


def tabled_predicates(graph: DependencyGraph) -> frozenset:
    """Predicates lying on a directed cycle (self-loops included)."""
    tabled = set()
    for comp in strongly_connected_components(graph):
        if len(comp) > 1:
            tabled.update(comp)
        else:
            (p,) = comp
            if (p, p) in graph.edges:
                tabled.add(p)
    return frozenset(tabled)
