"""Answer tables for tabled subgoals.

A :class:`TableStore` maps the canonical key of a subgoal's variant class to
its :class:`Table`.  Answers are kept in insertion order and deduplicated up
to variance.  A completed table is frozen; a completed empty table means the
subgoal is false.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import Atom, canonical_key, is_instance


class TablingError(RuntimeError):
    """Raised on misuse of the table store (an engine bug, not a user error)."""


@dataclass
class Table:
    atom: Atom
    comp: bool = False
    ans: list = field(default_factory=list)
    _keys: set = field(default_factory=set, repr=False)

    def __contains__(self, answer: Atom) -> bool:
        return canonical_key(answer) in self._keys

    def _insert(self, answer: Atom) -> bool:
        k = canonical_key(answer)
        if k in self._keys:
            return False
        self._keys.add(k)
        self.ans.append(answer)
        return True

    def copy(self) -> Table:
        return Table(self.atom, self.comp, list(self.ans), set(self._keys))

    def __str__(self):
        answers = ", ".join(map(str, self.ans))
        return f"{self.atom}: comp={int(self.comp)} ans={{{answers}}}"


@dataclass
class DeltaSet:
    """New answers collected during one round, in discovery order."""

    entries: list = field(default_factory=list)
    subgoals: dict = field(default_factory=dict, repr=False)
    _seen: set = field(default_factory=set, repr=False)

    def add(self, key: str, answer: Atom, subgoal: Atom | None = None) -> bool:
        marker = (key, canonical_key(answer))
        if marker in self._seen:
            return False
        self._seen.add(marker)
        self.entries.append((key, answer))
        if subgoal is not None:
            self.subgoals.setdefault(key, subgoal)
        return True

    def __len__(self):
        return len(self.entries)

    def __bool__(self):
        return bool(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def answers(self) -> list[Atom]:
        return [a for _, a in self.entries]


@dataclass
class TableStore:
    tables: dict = field(default_factory=dict)

    def lookup(self, a: Atom) -> Table | None:
        return self.tables.get(canonical_key(a))

    def table_for(self, a: Atom) -> Table:
        """The table of ``a``'s variant class, created empty if missing."""
        key = canonical_key(a)
        table = self.tables.get(key)
        if table is None:
            table = self.tables[key] = Table(a)
        return table

    def copy(self) -> TableStore:
        return TableStore({k: t.copy() for k, t in self.tables.items()})

    def snapshot(self) -> dict:
        """``key -> (comp, answer keys)``; cheap to compare across rounds."""
        return {
            k: (t.comp, tuple(canonical_key(a) for a in t.ans))
            for k, t in self.tables.items()
        }

    def dump(self) -> str:
        return "".join(f"{self.tables[k]}\n" for k in self.tables)

    def __len__(self):
        return len(self.tables)

    def __iter__(self):
        return iter(self.tables.values())


def lookup(store: TableStore, a: Atom) -> Table | None:
    return store.lookup(a)


def add_answer(store: TableStore, subgoal: Atom, answer: Atom, delta: DeltaSet) -> bool:
    """Table ``answer`` for ``subgoal`` unless a variant is already there.

    Returns whether anything was inserted.  Inserting into a completed table,
    or an answer that is not an instance of the subgoal, is a fault.
    """
    if not is_instance(subgoal, answer):
        raise TablingError(f"{answer} is not an instance of {subgoal}")
    table = store.table_for(subgoal)
    if table.comp:
        raise TablingError(f"table for {table.atom} is complete; cannot add {answer}")
    if not table._insert(answer):
        return False
    delta.add(canonical_key(table.atom), answer, table.atom)
    return True


def mark_complete(store: TableStore, subgoal: Atom) -> None:
    store.table_for(subgoal).comp = True


def merge_delta(store: TableStore, delta: DeltaSet) -> TableStore:
    """A new store holding ``store``'s answers plus every entry of ``delta``."""
    merged = store.copy()
    for key, answer in delta:
        table = merged.tables.get(key)
        if table is None:
            table = merged.tables[key] = Table(delta.subgoals.get(key, answer))
        table._insert(answer)
    return merged
