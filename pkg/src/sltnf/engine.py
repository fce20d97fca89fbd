"""Tabled top-down evaluation under the well-founded semantics.

:func:`solve` runs answer iteration: each round builds a generalized tree (a
top tree plus subsidiary trees for ground negative subgoals) against the
tables of the previous round, collects the new answers, merges them, and
marks tables whose answers can no longer grow as complete.  Positive loops
are cut with ``LOOP`` leaves; negative loops and undecided negative subgoals
are replaced by the ``u*`` marker.

Answer extraction uses call frames: selecting a tabled subgoal ``A`` at node
``N`` with program clauses opens a frame, and every body literal contributed
by that resolution records ``N`` among its ancestors.  The frame closes once
no literal in the goal descends from ``N``; at that point the frame's atom,
instantiated by all bindings made since, is an answer for ``A``.  A ``u*``
introduced by a literal of the frame taints it, and tainted closures are not
tabled.
"""

from __future__ import annotations

import enum
import logging
import sys
from collections import defaultdict
from dataclasses import dataclass, field

from .analysis import build_dependency_graph, tabled_predicates
from .oracle import Truth
from .terms import (
    EMPTY,
    LOOP,
    USTAR,
    Atom,
    Clause,
    Frame,
    Goal,
    Literal,
    Program,
    Subgoal,
    Substitution,
    apply,
    atom_size,
    canonical_key,
    goal_variables,
    is_variant,
    match,
    mgu,
    rename_apart,
)
from .tabling import DeltaSet, TableStore, add_answer, mark_complete
from .trees import NodeKind, SltnfTree, TreeNode, TreeSummary

log = logging.getLogger("sltnf")
TRACE = 5
logging.addLevelName(TRACE, "TRACE")


class ComputationRule(str, enum.Enum):
    LEFTMOST = "leftmost"
    LEFTMOST_POSITIVE_FIRST = "leftmost_positive_first"

    @classmethod
    def parse(cls, text: str) -> ComputationRule:
        aliases = {"positive-first": cls.LEFTMOST_POSITIVE_FIRST, "positive_first": cls.LEFTMOST_POSITIVE_FIRST}
        if text in aliases:
            return aliases[text]
        return cls(text)


class Status(str, enum.Enum):
    COMPLETE = "complete"
    UNDEFINED_RESIDUAL = "undefined_residual"
    FLOUNDERED = "floundered"
    LIMIT_EXCEEDED = "limit_exceeded"


@dataclass(frozen=True)
class Limits:
    max_term_size: int = 512
    max_nodes_per_tree: int = 100_000
    max_tree_depth_chain: int = 256
    max_iterations: int = 1000

    def __post_init__(self):
        for name in ("max_term_size", "max_nodes_per_tree", "max_tree_depth_chain", "max_iterations"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


class LimitExceeded(RuntimeError):
    pass


@dataclass
class RoundInfo:
    index: int
    new_answers: list
    completed: list
    tables: dict
    forest: SltnfTree | None = None


@dataclass
class QueryResult:
    query: Atom
    answers: tuple
    status: Status
    iterations: int
    store: TableStore
    history: list = field(default_factory=list)
    reason: str = ""

    @property
    def truth(self) -> str:
        """``true``, ``false``, ``undefined``, ``floundered`` or ``limit exceeded``."""
        if self.answers:
            return "true"
        if self.status is Status.COMPLETE:
            return "false"
        if self.status is Status.UNDEFINED_RESIDUAL:
            return "undefined"
        if self.status is Status.FLOUNDERED:
            return "floundered"
        return "limit exceeded"

    @property
    def answer_atoms(self) -> list[Atom]:
        return [apply(self.query, s) for s in self.answers]


def select(goal: Goal, rule: ComputationRule = ComputationRule.LEFTMOST) -> int | None:
    """Index of the subgoal chosen by ``rule``; markers are never chosen."""
    negative = None
    for i, sg in enumerate(goal.items):
        lit = sg.literal
        if not isinstance(lit, Literal):
            continue
        if rule is ComputationRule.LEFTMOST or lit.positive:
            return i
        if negative is None:
            negative = i
    return negative


@dataclass
class _FrameInfo:
    node: int
    subgoal: Atom
    key: str
    loop_ancestors: set = field(default_factory=set)
    flounder: bool = False
    interrupted: bool = False
    closed_new: bool = False
    closed_tainted: bool = False
    tainted_instance: bool = False


@dataclass
class _Region:
    """Outcome of the sub-derivation inside one call frame.

    ``selected`` holds the variant keys of tabled subgoals selected inside
    the frame; the outcome depends on the ancestor chain only through which
    of them are variants of chain atoms (``hits``).  ``impure`` marks an
    outcome that depends on the continuation (positive-first only), so it is
    never reused.  ``negated`` records a negative literal decided inside the
    frame; under positive-first such an outcome is reused only in an
    identical context.  ``cuts`` records a failure, flounder or loop leaf
    inside the frame.
    """

    node: int
    key: str
    roots: frozenset
    chain_keys: dict
    selected: set = field(default_factory=set)
    exits: dict = field(default_factory=dict)
    outer_loops: dict = field(default_factory=dict)
    inner_loops: dict = field(default_factory=dict)
    flounder: bool = False
    pending: int = 0
    done: bool = False
    hits: frozenset = frozenset()
    impure: bool = False
    negated: bool = False
    cuts: bool = False


class _Round:
    """Mutable state of one generalized-tree construction."""

    def __init__(self, index: int, snapshot: TableStore, prior_undef: dict | None = None):
        self.index = index
        self.snapshot = snapshot
        # Undefined instances of non-ground tabled subgoals: ``key -> {answer key: atom}``,
        # found this round and in the previous one.
        self.undef: dict = defaultdict(dict)
        self.prior_undef: dict = prior_undef or {}
        self.store = snapshot.copy()
        self.delta = DeltaSet()
        self.frames: dict[int, _FrameInfo] = {}
        self.memo: dict = {}
        self.probed: set = set()
        self.regions: dict[int, _Region] = {}
        self.shared: dict = defaultdict(list)
        self.foreign: dict = defaultdict(set)
        self.next_id = 0

    def new_id(self) -> int:
        n = self.next_id
        self.next_id += 1
        return n


class Engine:
    """Evaluates atomic queries against one program.

    ``retain_trees`` keeps every round's generalized tree in
    :attr:`QueryResult.history` (needed for :func:`~sltnf.trees.dump_tree`).
    Without it, identical subsidiary trees within a round are built once,
    and a call whose frame outcome was already derived in the same round
    and context reuses that outcome instead of re-deriving it.  Verdicts are
    identical either way; only the number of nodes differs.
    """

    def __init__(
        self,
        program: Program,
        rule: ComputationRule = ComputationRule.LEFTMOST,
        limits: Limits | None = None,
        retain_trees: bool = False,
        occurs_check: bool = True,
        share: bool | None = None,
    ):
        self.program = program
        self.rule = ComputationRule(rule)
        self.limits = limits or Limits()
        self.retain_trees = retain_trees
        self.occurs_check = occurs_check
        self.graph = build_dependency_graph(program)
        self.tabled = tabled_predicates(self.graph)
        self._clauses: dict = defaultdict(list)
        for c in program:
            self._clauses[c.head.indicator].append(c)
        self._reaches_negation = _reaches_negation(self.graph, self._clauses)
        self._round: _Round | None = None
        self.share = (not retain_trees) if share is None else share

    # -- driver ---------------------------------------------------------

    def solve(self, query: Goal | Atom) -> QueryResult:
        atom = _query_atom(query)
        wanted = 4 * self.limits.max_tree_depth_chain + 1000
        if sys.getrecursionlimit() < wanted:
            sys.setrecursionlimit(wanted)

        store = TableStore()
        history: list[RoundInfo] = []
        top = None
        stopped = False
        undef: dict = {}
        for i in range(self.limits.max_iterations):
            rnd = self._round = _Round(i, store, undef)
            try:
                top = self._build_tree(atom, None)
            except LimitExceeded as exc:
                log.debug("round %d: %s", i, exc)
                return QueryResult(atom, (), Status.LIMIT_EXCEEDED, i + 1, store, history, str(exc))
            completed = self.check_completion(rnd)
            store = rnd.store
            history.append(
                RoundInfo(i, list(rnd.delta), completed, store.snapshot(), top if self.retain_trees else None)
            )
            log.debug("round %d: %d new answers, completed %s", i, len(rnd.delta), completed)
            table = store.lookup(atom) if atom.indicator in self.tabled else None
            settled = _undef_keys(rnd.undef) == _undef_keys(undef)
            undef = dict(rnd.undef)
            if (not rnd.delta and settled) or (table is not None and table.comp):
                stopped = True
                break
        last, self._round = self._round, None
        iterations = len(history)
        if not stopped:
            return QueryResult(
                atom, (), Status.LIMIT_EXCEEDED, iterations, store, history,
                f"no fixpoint after {iterations} iterations",
            )
        return self._result(atom, top, store, history, last)

    def _result(self, atom: Atom, top: SltnfTree, store: TableStore, history: list, rnd: _Round) -> QueryResult:
        if atom.indicator in self.tabled:
            table = store.lookup(atom)
            found = list(table.ans) if table is not None else []
            complete = table is not None and table.comp
        else:
            found, seen = [], set()
            for a in top.summary.answers:
                k = canonical_key(a)
                if k not in seen:
                    seen.add(k)
                    found.append(a)
            complete = False
        answers = tuple(match(atom, a) for a in found)
        s = top.summary
        if answers:
            status = Status.COMPLETE
        elif s.has_flounder:
            status = Status.FLOUNDERED
        elif complete or self.naf_holds(top, rnd):
            status = Status.COMPLETE
        else:
            status = Status.UNDEFINED_RESIDUAL
        return QueryResult(atom, answers, status, len(history), store, history)

    # -- completion -----------------------------------------------------

    def naf_holds(self, tree: SltnfTree, rnd: _Round | None = None) -> bool:
        """Negation as finite failure for the root atom of ``tree``.

        Every branch must end at a failure or loop leaf, and no loop leaf's
        ancestor loop subgoal may have produced an answer missing from the
        tables the round started with.
        """
        rnd = rnd or self._round
        s = tree.summary
        if s.has_success or s.has_flounder or s.has_temp_undef:
            return False
        if rnd is None:
            return not s.loop_leaves
        # A new undefined instance of a non-ground loop subgoal reaches its
        # loop nodes only in the next round.
        if any(rnd.frames[anc].closed_new or rnd.frames[anc].tainted_instance for _, anc in s.loop_leaves):
            return False
        return all(self._dependency_settled(k, rnd) for k in rnd.foreign.get(tree, ()))

    def _dependency_settled(self, k: int, rnd: _Round) -> bool:
        # A loop ancestor outside the tree: its undefined or floundering
        # derivations are not visible among the tree's leaves, so it must be
        # finished and settled outright.
        region = rnd.regions.get(k)
        if region is not None and not region.done:
            return False
        info = rnd.frames[k]
        if info.closed_new or info.closed_tainted or info.flounder or info.interrupted:
            return False
        # Undefined instances of non-ground loop subgoals already fed back this
        # round show up as tainted answers of ``k`` itself.
        todo, checked = list(info.loop_ancestors), set()
        while todo:
            j = todo.pop()
            if j in checked:
                continue
            checked.add(j)
            anc = rnd.frames[j]
            fed = anc.closed_tainted and not anc.subgoal.is_ground and not anc.tainted_instance
            if anc.closed_new or anc.flounder or anc.interrupted or (anc.closed_tainted and not fed):
                return False
            todo.extend(anc.loop_ancestors)
        return True

    def check_completion(self, rnd: _Round) -> list[str]:
        """Mark tables complete after a round; returns the keys marked."""
        marked = []
        for key, table in rnd.store.tables.items():
            if not table.comp and table.atom.is_ground and len(table.ans) == 1:
                mark_complete(rnd.store, table.atom)
                marked.append(key)
        for nid, info in rnd.frames.items():
            table = rnd.store.tables[info.key]
            if table.comp:
                continue
            if self._frame_settled(nid, rnd):
                mark_complete(rnd.store, table.atom)
                marked.append(info.key)
        return marked

    @staticmethod
    def _frame_settled(nid: int, rnd: _Round) -> bool:
        info = rnd.frames[nid]
        if info.closed_tainted or info.flounder or info.interrupted:
            return False
        todo = list(info.loop_ancestors)
        checked = set()
        while todo:
            k = todo.pop()
            if k in checked:
                continue
            checked.add(k)
            anc = rnd.frames[k]
            if anc.closed_new or anc.closed_tainted or anc.flounder or anc.interrupted:
                return False
            todo.extend(anc.loop_ancestors)
        return True

    # -- tree construction ---------------------------------------------

    def _build_tree(self, atom: Atom, parent: SltnfTree | None, attach: bool = True) -> SltnfTree:
        rnd = self._round
        depth = 0 if parent is None else parent.depth + 1
        if depth >= self.limits.max_tree_depth_chain:
            raise LimitExceeded(f"subsidiary tree chain deeper than {self.limits.max_tree_depth_chain}")
        roots = (parent.roots if parent is not None else frozenset()) | {atom}
        root_goal = Goal((Subgoal(Literal(atom)),), (), atom)
        root = TreeNode(rnd.new_id(), root_goal)
        tree = SltnfTree(root, root_goal, parent, roots=roots, depth=depth)
        if parent is not None and self.retain_trees and attach:
            parent.subsidiaries.append(tree)
        log.log(TRACE, "tree %s: <- %s (depth %d)", root.name, atom, depth)
        stack = [root]
        while stack:
            node = stack.pop()
            tree.size += 1
            if tree.size > self.limits.max_nodes_per_tree:
                raise LimitExceeded(f"tree {root.name} exceeds {self.limits.max_nodes_per_tree} nodes")
            self._expand(node, tree)
            stack.extend(reversed(node.children))
        return tree

    def _subsidiary(self, atom: Atom, tree: SltnfTree, attach: bool = True) -> SltnfTree:
        if self.retain_trees:
            return self._build_tree(atom, tree, attach)
        key = (atom, tree.roots)
        memo = self._round.memo
        sub = memo.get(key)
        if sub is None:
            sub = memo[key] = self._build_tree(atom, tree)
        return sub

    def _expand(self, node: TreeNode, tree: SltnfTree) -> None:
        items = node.goal.items
        if not items:
            node.kind = NodeKind.SUCCESS
            tree.summary.has_success = True
            tree.summary.answers.append(node.goal.query)
            return
        first = items[0].literal
        if first is USTAR:
            node.kind = NodeKind.TEMP_UNDEFINED
            tree.summary.has_temp_undef = True
            return
        if first is LOOP:
            node.kind = NodeKind.LOOP_LEAF
            return
        idx = select(node.goal, self.rule)
        if idx is None:
            node.kind = NodeKind.TEMP_UNDEFINED
            tree.summary.has_temp_undef = True
            return
        node.selected = idx
        sg = items[idx]
        node.anc_chain = sg.ancestors
        if log.isEnabledFor(TRACE):
            log.log(TRACE, "%s: %s  [select %s]", node.name, node.goal, sg.literal)
        if self.rule is ComputationRule.LEFTMOST_POSITIVE_FIRST and node.goal.frames:
            self._probe_frames(node.goal, sg, tree)
        active = self._active_regions(node.goal) if self.share else ()
        for r in active:
            r.pending -= 1
            if not sg.literal.positive:
                r.negated = True
        if sg.literal.positive:
            self._expand_positive(node, tree, idx, sg, active)
        else:
            self._expand_negative(node, tree, idx, sg, active)
        if not self.retain_trees and len(node.children) > 1:
            # Identical sibling goals have identical subtrees.
            seen = set()
            unique = []
            for child in node.children:
                if child.goal not in seen:
                    seen.add(child.goal)
                    unique.append(child)
            node.children = unique
        if self.share:
            self._settle_regions(node, active)
        if node.kind in (NodeKind.FAILURE, NodeKind.FLOUNDER) or any(c.origin == "loop" for c in node.children):
            for r in active:
                r.cuts = True
            if node.goal.frames:
                self._interrupt(node.goal.frames, sg)

    def _active_regions(self, goal: Goal) -> list:
        regions = self._round.regions
        out = []
        for f in goal.frames:
            r = regions.get(f.node)
            if r is not None and not r.done:
                out.append(r)
        return out

    def _settle_regions(self, node: TreeNode, active: list) -> None:
        rnd = self._round
        own = rnd.regions.get(node.id)
        touched = list(active) + ([own] if own is not None else [])
        for child in node.children:
            for r in self._active_regions(child.goal):
                r.pending += 1
        for r in touched:
            if r.pending == 0 and not r.done:
                r.done = True
                r.hits = frozenset(k for k in r.selected if k in r.chain_keys)
                rnd.shared[(r.key, r.roots)].append(r)

    def _interrupt(self, frames: tuple, sg: Subgoal) -> None:
        # An open frame whose branch is cut by a literal it did not contribute
        # has not been fully explored on that branch.
        owners = {nid for nid, _ in sg.ancestors}
        for f in frames:
            if f.node not in owners:
                self._round.frames[f.node].interrupted = True

    def _expand_positive(self, node: TreeNode, tree: SltnfTree, idx: int, sg: Subgoal, active=()) -> None:
        rnd = self._round
        a = sg.literal.atom
        self._check_size(a)
        if a.indicator not in self.tabled:
            node.children = self._clause_children(node, tree, idx, sg, open_frame=False)
            if not node.children:
                node.kind = NodeKind.FAILURE
            return

        table = rnd.snapshot.lookup(a)
        answers = list(table.ans) if table is not None else []
        if table is not None and table.comp:
            node.note = "complete table"
            node.children = [self._answer_child(node, tree, idx, ans) for ans in answers]
            if not node.children:
                node.kind = NodeKind.FAILURE
            return

        working = rnd.store.table_for(a)
        key = canonical_key(working.atom)
        for r in active:
            r.selected.add(key)
        children = [self._answer_child(node, tree, idx, ans) for ans in answers]
        loop_anc = None
        for nid, b in sg.ancestors:
            if is_variant(b, a):
                loop_anc = nid
                break
        if loop_anc is not None:
            info = rnd.frames[node.id] = _FrameInfo(node.id, a, key)
            info.loop_ancestors.add(loop_anc)
            self._note_loop(tree, a, loop_anc, key, (node.id,), sg.ancestors, active)
            known = {canonical_key(x) for x in answers}
            for k, u in rnd.prior_undef.get(key, {}).items():
                if k not in known:
                    children.append(self._resolvent(node, tree, idx, sg, u, True, "undefined"))
            leaf = TreeNode(rnd.new_id(), Goal((Subgoal(LOOP),)), origin="loop", loop_ancestor=loop_anc)
            children.append(leaf)
            node.note = f"loop on N{loop_anc}"
        else:
            reused = self._reuse(node, tree, idx, sg, key, active) if self.share else None
            if reused is not None:
                node.note = f"outcome of N{reused.node}"
                children.extend(self._replay(node, tree, idx, sg, reused, active))
            else:
                rnd.frames[node.id] = _FrameInfo(node.id, a, key)
                if self.share:
                    chain_keys = {canonical_key(b): nid for nid, b in sg.ancestors}
                    rnd.regions[node.id] = _Region(node.id, key, tree.roots, chain_keys)
                children.extend(self._clause_children(node, tree, idx, sg, open_frame=True))
        node.children = children
        if not children:
            node.kind = NodeKind.FAILURE

    def _note_loop(self, tree, v: Atom, k: int, k_key: str, inner: tuple, chain: tuple, active,
                   foreign: bool = False) -> None:
        """Record a loop leaf for subgoal ``v`` cut against ancestor node ``k``.

        ``inner`` are frame nodes below ``chain`` that also depend on ``k``.
        ``foreign`` marks a ``k`` that is not an ancestor within ``tree``.
        """
        frames = self._round.frames
        if foreign:
            self._round.foreign[tree].add(k)
        for nid in inner:
            frames[nid].loop_ancestors.add(k)
        for nid, _ in chain:
            frame = frames.get(nid)
            if frame is not None:
                frame.loop_ancestors.add(k)
        tree.summary.add_loop_leaf(v, k)
        for r in active:
            outer = r.chain_keys.values()
            if k in outer:
                below = {nid for nid, _ in chain if nid not in outer and nid in frames}
                entry = r.outer_loops.setdefault((k_key, k), (v, set()))
                entry[1].update(inner, below)
            else:
                r.inner_loops[(v, k)] = foreign or r.inner_loops.get((v, k), False)

    def _reuse(self, node, tree, idx, sg, key, active):
        rnd = self._round
        candidates = rnd.shared.get((key, tree.roots))
        if not candidates:
            return None
        chain_keys = {canonical_key(b) for _, b in sg.ancestors}
        candidates = [r for r in candidates if not r.impure]
        for r in candidates:
            if all((k in chain_keys) == (k in r.hits) for k in r.selected):
                return r
        if self.rule is ComputationRule.LEFTMOST_POSITIVE_FIRST:
            # Cuts inside a region can hide negative literals its outcome
            # depends on, so only negation-free predicates are exempt.
            if sg.literal.atom.indicator in self._reaches_negation:
                return None
            candidates = [r for r in candidates if not r.negated]
        for r in candidates:
            if not any(self._unsafe_foreign(k, rnd) for k in self._foreign_of(r, chain_keys)):
                return r
        return None

    @staticmethod
    def _foreign_of(r: _Region, chain_keys) -> list:
        out = [k for (k_key, k) in r.outer_loops if k_key not in chain_keys]
        out.extend(k for (_, k), foreign in r.inner_loops.items() if foreign)
        return out

    @staticmethod
    def _unsafe_foreign(k: int, rnd: _Round) -> bool:
        # A finished foreign ancestor that is tainted or unsettled would hide
        # derivations the consumer's own expansion would have made.
        region = rnd.regions.get(k)
        if region is not None and not region.done:
            return False
        info = rnd.frames[k]
        return info.closed_new or info.closed_tainted or info.flounder or info.interrupted

    def _replay(self, node, tree, idx, sg, r: _Region, active) -> list:
        # The outcome may come from a context whose chain cut different
        # subgoals.  Cuts missing here stay as dependencies on the original
        # ancestor frames; cuts this chain would add become dependencies on
        # its own ancestors.  Both only delay completion and NAF.
        rnd = self._round
        chain_ids = {canonical_key(b): nid for nid, b in sg.ancestors}
        chain_atoms = {canonical_key(b): b for _, b in sg.ancestors}
        for r2 in active:
            r2.selected |= r.selected
        for (v, k), foreign in r.inner_loops.items():
            self._note_loop(tree, v, k, "", (), sg.ancestors, active, foreign)
        covered = set()
        for (k_key, k), (v, inner) in r.outer_loops.items():
            here = chain_ids.get(k_key, k)
            covered.add(k_key)
            self._note_loop(tree, v, here, k_key, tuple(inner), sg.ancestors, active, k_key not in chain_ids)
        for k_key in sorted(r.selected - covered):
            if k_key in chain_ids:
                self._note_loop(tree, chain_atoms[k_key], chain_ids[k_key], k_key, (), sg.ancestors, active)
        if r.flounder:
            tree.summary.has_flounder = True
            for nid, _ in sg.ancestors:
                frame = rnd.frames.get(nid)
                if frame is not None:
                    frame.flounder = True
            for r2 in active:
                r2.flounder = True
        goal = node.goal
        if r.cuts and goal.frames:
            self._interrupt(goal.frames, sg)
        return [self._resolvent(node, tree, idx, sg, answer, tainted, "shared")
                for answer, tainted in r.exits.values()]

    def _resolvent(self, node, tree, idx, sg, answer: Atom, tainted: bool, origin: str) -> TreeNode:
        """Resolve the selected subgoal with ``answer``; a tainted answer carries a ``u*``."""
        goal = node.goal
        renamed = rename_apart(Clause(answer), goal_variables(goal)).head
        theta = mgu(sg.literal.atom, renamed, self.occurs_check)
        if theta is None:
            raise AssertionError(f"{origin} answer {answer} does not unify with {sg.literal.atom}")
        items = tuple(apply(s, theta) for i, s in enumerate(goal.items) if i != idx)
        frames = tuple(apply(f, theta) for f in goal.frames)
        if tainted:
            owners = {nid for nid, _ in sg.ancestors}
            frames = tuple(Frame(f.node, f.subgoal, f.atom, True) if f.node in owners else f for f in frames)
            if not items or items[-1].literal is not USTAR:
                items += (Subgoal(USTAR),)
        query = apply(goal.query, theta) if goal.query is not None else None
        child_goal = self._close_frames(Goal(items, frames, query), tree)
        return self._child(child_goal, origin, theta, goal)

    def _expand_negative(self, node: TreeNode, tree: SltnfTree, idx: int, sg: Subgoal, active=()) -> None:
        rnd = self._round
        a = sg.literal.atom
        if not a.is_ground:
            self._flounder(node, tree, sg, active)
            return
        table = rnd.snapshot.lookup(a) if a.indicator in self.tabled else None
        if table is not None and table.comp:
            if not table.ans:
                node.note = "complete, false"
                node.children = [self._drop_child(node, tree, idx)]
            else:
                node.note = "complete, true"
                node.kind = NodeKind.FAILURE
            return
        if a in tree.roots:
            node.note = "negative loop"
            node.children = [self._ustar_child(node, tree, idx, sg)]
            return
        sub = self._subsidiary(a, tree)
        node.subsidiary = sub
        s = sub.summary
        if s.has_success:
            node.note = "subsidiary succeeded"
            node.kind = NodeKind.FAILURE
        elif s.has_flounder:
            node.note = "subsidiary floundered"
            self._flounder(node, tree, sg, active)
        elif self.naf_holds(sub):
            node.note = "negation as finite failure"
            node.children = [self._drop_child(node, tree, idx)]
        else:
            node.note = "temporarily undefined"
            node.children = [self._ustar_child(node, tree, idx, sg)]

    def _probe_frames(self, goal: Goal, sg: Subgoal, tree: SltnfTree) -> None:
        """Record answers of frames left with only ground negative literals.

        Positive-first may select a literal the frame did not contribute ahead
        of the frame's pending negative literals; if that branch then fails,
        the frame's instance would never reach its table.  Its pending
        literals are decided here instead, without changing the tree.  A frame
        whose pending literals cannot be decided this way makes its region's
        outcome depend on the continuation, so the region is not shared.
        """
        rnd = self._round
        owners = {nid for nid, _ in sg.ancestors}
        for f in goal.frames:
            if f.node in owners:
                continue
            region = rnd.regions.get(f.node)
            if region is not None and region.done:
                region = None
            owned = [s.literal for s in goal.items if any(nid == f.node for nid, _ in s.ancestors)]
            if not all(isinstance(lit, Literal) and lit.negative and lit.atom.is_ground for lit in owned):
                if region is not None:
                    region.impure = True
                continue
            mark = (f.node, canonical_key(f.atom), f.tainted, frozenset(lit.atom for lit in owned))
            if mark in rnd.probed:
                continue
            rnd.probed.add(mark)
            for r in self._active_regions(goal):
                r.negated = True
            verdicts = [self._negation_verdict(lit.atom, tree) for lit in owned]
            if None in verdicts:
                if region is not None:
                    region.impure = True
                continue
            if Truth.FALSE in verdicts:
                continue
            tainted = f.tainted or Truth.UNDEFINED in verdicts
            if region is not None:
                region.exits.setdefault((canonical_key(f.atom), tainted), (f.atom, tainted))
            self._record_answer(Frame(f.node, f.subgoal, f.atom, tainted), tree)

    def _negation_verdict(self, a: Atom, tree: SltnfTree) -> Truth | None:
        """Truth of ``not a`` as its selection would decide it; None if it flounders."""
        table = self._round.snapshot.lookup(a) if a.indicator in self.tabled else None
        if table is not None and table.comp:
            return Truth.FALSE if table.ans else Truth.TRUE
        if a in tree.roots:
            return Truth.UNDEFINED
        sub = self._subsidiary(a, tree, attach=False)
        s = sub.summary
        if s.has_success:
            return Truth.FALSE
        if s.has_flounder:
            return None
        return Truth.TRUE if self.naf_holds(sub) else Truth.UNDEFINED

    def _flounder(self, node: TreeNode, tree: SltnfTree, sg: Subgoal, active=()) -> None:
        node.kind = NodeKind.FLOUNDER
        tree.summary.has_flounder = True
        for r in active:
            r.flounder = True
        for nid, _ in sg.ancestors:
            frame = self._round.frames.get(nid)
            if frame is not None:
                frame.flounder = True

    # -- child construction --------------------------------------------

    def _clause_children(self, node, tree, idx, sg, open_frame: bool) -> list:
        a = sg.literal.atom
        goal = node.goal
        avoid = goal_variables(goal)
        new_anc = sg.ancestors + ((node.id, a),)
        children = []
        for clause in self._clauses.get(a.indicator, ()):
            renamed = rename_apart(clause, avoid)
            theta = mgu(a, renamed.head, self.occurs_check)
            if theta is None:
                continue
            body = tuple(Subgoal(apply(lit, theta), new_anc) for lit in renamed.body)
            items = (
                tuple(apply(s, theta) for s in goal.items[:idx])
                + body
                + tuple(apply(s, theta) for s in goal.items[idx + 1:])
            )
            frames = tuple(apply(f, theta) for f in goal.frames)
            if open_frame:
                frames += (Frame(node.id, a, apply(a, theta)),)
            query = apply(goal.query, theta) if goal.query is not None else None
            child_goal = self._close_frames(Goal(items, frames, query), tree)
            children.append(self._child(child_goal, "clause", theta, goal))
        return children

    def _answer_child(self, node, tree, idx, answer: Atom) -> TreeNode:
        goal = node.goal
        a = goal.items[idx].literal.atom
        renamed = rename_apart(Clause(answer), goal_variables(goal)).head
        theta = mgu(a, renamed, self.occurs_check)
        if theta is None:
            raise AssertionError(f"tabled answer {answer} does not unify with {a}")
        items = tuple(apply(s, theta) for i, s in enumerate(goal.items) if i != idx)
        frames = tuple(apply(f, theta) for f in goal.frames)
        query = apply(goal.query, theta) if goal.query is not None else None
        child_goal = self._close_frames(Goal(items, frames, query), tree)
        return self._child(child_goal, "answer", theta, goal)

    def _drop_child(self, node, tree, idx) -> TreeNode:
        goal = node.goal
        items = goal.items[:idx] + goal.items[idx + 1:]
        child_goal = self._close_frames(Goal(items, goal.frames, goal.query), tree)
        return self._child(child_goal, "negation", EMPTY, goal)

    def _ustar_child(self, node, tree, idx, sg) -> TreeNode:
        goal = node.goal
        owners = {nid for nid, _ in sg.ancestors}
        frames = tuple(
            Frame(f.node, f.subgoal, f.atom, True) if f.node in owners else f for f in goal.frames
        )
        items = goal.items[:idx] + goal.items[idx + 1:]
        if not items or items[-1].literal is not USTAR:
            items += (Subgoal(USTAR),)
        child_goal = self._close_frames(Goal(items, frames, goal.query), tree)
        return self._child(child_goal, "negation", EMPTY, goal)

    def _child(self, goal: Goal, origin: str, theta: Substitution, parent_goal: Goal) -> TreeNode:
        shown = theta.restrict(goal_variables(parent_goal)) if theta else EMPTY
        if not self.retain_trees and len(goal.items) > 1:
            goal = _merge_duplicates(goal)
        return TreeNode(self._round.new_id(), goal, origin=origin, binding=shown)

    def _close_frames(self, goal: Goal, tree: SltnfTree) -> Goal:
        if not goal.frames:
            return goal
        live = {nid for sg in goal.items for nid, _ in sg.ancestors}
        keep = []
        for f in goal.frames:
            if f.node in live:
                keep.append(f)
            else:
                r = self._round.regions.get(f.node)
                if r is not None and not r.done:
                    r.exits.setdefault((canonical_key(f.atom), f.tainted), (f.atom, f.tainted))
                self._record_answer(f, tree)
        if len(keep) == len(goal.frames):
            return goal
        return Goal(goal.items, tuple(keep), goal.query)

    def _record_answer(self, frame: Frame, tree: SltnfTree) -> None:
        rnd = self._round
        info = rnd.frames[frame.node]
        if frame.tainted:
            info.closed_tainted = True
            if not frame.subgoal.is_ground:
                k = canonical_key(frame.atom)
                rnd.undef[info.key].setdefault(k, frame.atom)
                if k not in rnd.prior_undef.get(info.key, {}):
                    info.tainted_instance = True
            return
        self._check_size(frame.atom)
        known = rnd.snapshot.lookup(frame.subgoal)
        if known is None or frame.atom not in known:
            info.closed_new = True
            tree.summary.new_answer_nodes.add(frame.node)
        add_answer(rnd.store, frame.subgoal, frame.atom, rnd.delta)

    def _check_size(self, a: Atom) -> None:
        if a.args and atom_size(a) > self.limits.max_term_size:
            raise LimitExceeded(f"term size of {a} exceeds {self.limits.max_term_size}")


def _reaches_negation(graph, clauses: dict) -> set:
    """Predicates with a path in the dependency graph to a clause with a negative literal."""
    out = {p for p, cs in clauses.items() if any(lit.negative for c in cs for lit in c.body)}
    changed = True
    while changed:
        changed = False
        for p in graph.nodes:
            if p not in out and any(q in out for q in graph.successors(p)):
                out.add(p)
                changed = True
    return out


def _undef_keys(undef: dict) -> set:
    return {(key, k) for key, found in undef.items() for k in found}


def _merge_duplicates(goal: Goal) -> Goal:
    """Drop repeated ground literals that would be resolved identically.

    A repeated negative literal is decided by the same subsidiary tree, so
    its ancestors join the first occurrence.  A repeated positive literal is
    dropped only when its ancestors coincide, since they steer loop checks.
    """
    first: dict = {}
    items = list(goal.items)
    changed = False
    for i, sg in enumerate(goal.items):
        lit = sg.literal
        if not isinstance(lit, Literal) or not lit.atom.is_ground:
            continue
        j = first.get(lit)
        if j is None:
            first[lit] = i
            continue
        kept = items[j]
        if lit.negative:
            extra = tuple(x for x in sg.ancestors if x not in kept.ancestors)
            items[j] = Subgoal(lit, kept.ancestors + extra)
        elif sg.ancestors != kept.ancestors:
            continue
        items[i] = None
        changed = True
    if not changed:
        return goal
    return Goal(tuple(sg for sg in items if sg is not None), goal.frames, goal.query)


def _query_atom(query: Goal | Atom) -> Atom:
    if isinstance(query, Atom):
        return query
    lits = query.literals
    if len(lits) != 1 or not isinstance(lits[0], Literal) or lits[0].negative:
        raise ValueError("the top goal must be a single positive atom")
    return lits[0].atom


def solve(
    program: Program,
    query: Goal | Atom,
    rule: ComputationRule = ComputationRule.LEFTMOST,
    limits: Limits | None = None,
    retain_trees: bool = False,
) -> QueryResult:
    return Engine(program, rule, limits, retain_trees).solve(query)
