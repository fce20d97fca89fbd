"""Derivation-tree nodes, per-tree summaries, DOT export and structural audits."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .terms import EMPTY, LOOP, USTAR, Goal, Literal, Substitution, is_variant


class NodeKind(str, enum.Enum):
    INTERIOR = "interior"
    SUCCESS = "success"
    FAILURE = "failure"
    FLOUNDER = "flounder"
    TEMP_UNDEFINED = "temp_undefined"
    LOOP_LEAF = "loop_leaf"


LEAF_MARKS = {
    NodeKind.SUCCESS: "□_t",
    NodeKind.FAILURE: "□_f",
    NodeKind.FLOUNDER: "□_fl",
    NodeKind.TEMP_UNDEFINED: "□_{u*}",
    NodeKind.LOOP_LEAF: "□_{loop}",
}


@dataclass(eq=False)
class TreeNode:
    id: int
    goal: Goal
    origin: str = "root"
    binding: Substitution = EMPTY
    selected: int | None = None
    kind: NodeKind = NodeKind.INTERIOR
    children: list = field(default_factory=list)
    anc_chain: tuple = ()
    subsidiary: SltnfTree | None = None
    loop_ancestor: int | None = None
    note: str = ""

    @property
    def name(self) -> str:
        return f"N{self.id}"

    @property
    def is_leaf(self) -> bool:
        return self.kind is not NodeKind.INTERIOR

    def walk(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


@dataclass
class TreeSummary:
    has_success: bool = False
    has_flounder: bool = False
    has_temp_undef: bool = False
    loop_leaves: list = field(default_factory=list)
    new_answer_nodes: set = field(default_factory=set)
    answers: list = field(default_factory=list)
    _loop_keys: set = field(default_factory=set, repr=False)

    def add_loop_leaf(self, v, ancestor: int) -> None:
        """Record a loop leaf; repeated ``(v, ancestor)`` pairs are kept once."""
        if (v, ancestor) not in self._loop_keys:
            self._loop_keys.add((v, ancestor))
            self.loop_leaves.append((v, ancestor))


@dataclass(eq=False)
class SltnfTree:
    root: TreeNode
    root_goal: Goal
    parent_tree: SltnfTree | None = None
    subsidiaries: list = field(default_factory=list)
    summary: TreeSummary = field(default_factory=TreeSummary)
    roots: frozenset = frozenset()
    depth: int = 0
    size: int = 0

    @property
    def root_atom(self):
        return self.root_goal.query

    def forest(self):
        """This tree followed by every descendant tree, depth first."""
        stack = [self]
        while stack:
            t = stack.pop()
            yield t
            stack.extend(reversed(t.subsidiaries))

    def ancestor_trees(self):
        t = self.parent_tree
        while t is not None:
            yield t
            t = t.parent_tree


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _node_label(node: TreeNode) -> str:
    goal = str(node.goal) or ""
    label = f"{node.name}: {goal}" if goal else node.name
    if node.is_leaf:
        label += f"\\n{LEAF_MARKS[node.kind]}"
    return label


def dump_tree(tree: SltnfTree, name: str = "sltnf") -> str:
    """Deterministic DOT text for a generalized tree.

    Each tree becomes a cluster; edges inside a tree are solid, edges from a
    node selecting ``not A`` to the root of its subsidiary tree are dashed.
    """
    lines = [f'digraph "{_dot_escape(name)}" {{', '  node [shape=box, fontname="monospace"];']
    dashed = []
    for t in tree.forest():
        lines.append(f"  subgraph cluster_{t.root.name} {{")
        lines.append(f'    label="T_{t.root.name}: {_dot_escape(str(t.root_goal))}";')
        for node in t.root.walk():
            attrs = f'label="{_dot_escape(_node_label(node))}", kind="{node.kind.value}"'
            lines.append(f"    {node.name} [{attrs}];")
            for child in node.children:
                edge = f"    {node.name} -> {child.name}"
                if child.binding:
                    edge += f' [label="{_dot_escape(str(child.binding))}"]'
                lines.append(edge + ";")
            if node.subsidiary is not None:
                dashed.append((node, node.subsidiary))
        lines.append("  }")
    for node, sub in dashed:
        lines.append(f"  {node.name} -> {sub.root.name} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def audit_forest(tree: SltnfTree, tabled: frozenset | set | None = None) -> list[str]:
    """Check the structural invariants of a retained generalized tree.

    Returns a list of violations (empty when everything holds).
    """
    problems = []
    for t in tree.forest():
        if t.root.anc_chain:
            problems.append(f"{t.root.name}: tree root has ancestor subgoals")
        seen_roots = [t.root_atom] + [a.root_atom for a in t.ancestor_trees()]
        if len(seen_roots) != len(set(seen_roots)):
            problems.append(f"T_{t.root.name}: repeated root goal along subsidiary chain")
        for node in t.root.walk():
            problems.extend(_audit_node(node, tabled))
    return problems


def _audit_node(node: TreeNode, tabled) -> list[str]:
    out = []
    lits = node.goal.literals
    ustars = [i for i, lit in enumerate(lits) if lit is USTAR]
    if len(ustars) > 1 or (ustars and ustars[0] != len(lits) - 1):
        out.append(f"{node.name}: u* not unique or not last in {node.goal}")
    if LOOP in lits and len(lits) != 1:
        out.append(f"{node.name}: LOOP is not the sole literal")
    if (node.kind is NodeKind.SUCCESS) != (len(lits) == 0):
        out.append(f"{node.name}: success leaf iff empty goal violated")
    if node.kind is NodeKind.TEMP_UNDEFINED and (not lits or lits[0] is not USTAR):
        out.append(f"{node.name}: temp-undefined leaf without leading u*")
    if (node.kind is NodeKind.LOOP_LEAF) != (lits == (LOOP,)):
        out.append(f"{node.name}: loop leaf iff goal is LOOP violated")
    for sg in node.goal.items:
        chain = [a for _, a in sg.ancestors]
        for i in range(len(chain)):
            for j in range(i + 1, len(chain)):
                if is_variant(chain[i], chain[j]):
                    out.append(f"{node.name}: descendant loop subgoal {chain[j]} was expanded")
    if node.selected is not None:
        lit = lits[node.selected]
        if not isinstance(lit, Literal):
            out.append(f"{node.name}: selected a marker")
        elif lit.positive:
            looping = [
                nid for nid, a in node.anc_chain if is_variant(a, lit.atom)
            ]
            origins = [c.origin for c in node.children]
            if looping and node.note != "complete table":
                if origins.count("loop") != 1 or "clause" in origins:
                    out.append(f"{node.name}: loop node must have one LOOP child and no clause children")
                if tabled is not None and lit.atom.indicator not in tabled:
                    out.append(f"{node.name}: loop on non-tabled subgoal {lit.atom}")
            elif "loop" in origins:
                out.append(f"{node.name}: LOOP child on a non-loop node")
    return out
