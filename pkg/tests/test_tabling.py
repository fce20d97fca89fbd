import pytest

from sltnf.parser import parse_atom
from sltnf.tabling import DeltaSet, TableStore, TablingError, add_answer, lookup, mark_complete, merge_delta


def A(text):
    return parse_atom(text)


def test_variant_lookup_hits():
    store = TableStore()
    add_answer(store, A("p(a,Y)"), A("p(a,b)"), DeltaSet())
    table = lookup(store, A("p(a,Z)"))
    assert table is not None and [str(x) for x in table.ans] == ["p(a,b)"]


def test_lookup_empty_store():
    assert lookup(TableStore(), A("r")) is None


def test_lookup_distinguishes_non_variants():
    store = TableStore()
    store.table_for(A("p(X,Y)"))
    assert lookup(store, A("p(X,X)")) is None


def test_add_answer_reports_insertion():
    store, delta = TableStore(), DeltaSet()
    assert add_answer(store, A("p(a,Y)"), A("p(a,b)"), delta)
    assert [str(x) for x in lookup(store, A("p(a,Y)")).ans] == ["p(a,b)"]
    assert not add_answer(store, A("p(a,Y)"), A("p(a,b)"), delta)
    assert add_answer(store, A("p(a,Y)"), A("p(a,c)"), delta)
    assert [str(a) for a in delta.answers()] == ["p(a,b)", "p(a,c)"]


def test_variant_answers_are_duplicates():
    store, delta = TableStore(), DeltaSet()
    assert add_answer(store, A("p(X)"), A("p(f(U))"), delta)
    assert not add_answer(store, A("p(X)"), A("p(f(V))"), delta)


def test_non_instance_answer_faults():
    with pytest.raises(TablingError):
        add_answer(TableStore(), A("p(a,Y)"), A("p(b,b)"), DeltaSet())


def test_mark_complete_empty_means_false():
    store = TableStore()
    mark_complete(store, A("r"))
    table = lookup(store, A("r"))
    assert table.comp and not table.ans


def test_mark_complete_idempotent():
    store = TableStore()
    mark_complete(store, A("r"))
    mark_complete(store, A("r"))
    assert lookup(store, A("r")).comp


def test_complete_table_is_frozen():
    store = TableStore()
    mark_complete(store, A("p(X)"))
    with pytest.raises(TablingError):
        add_answer(store, A("p(X)"), A("p(a)"), DeltaSet())


def test_merge_into_empty():
    src, delta = TableStore(), DeltaSet()
    add_answer(src, A("p(a,Y)"), A("p(a,b)"), delta)
    merged = merge_delta(TableStore(), delta)
    assert len(merged) == 1
    assert A("p(a,b)") in lookup(merged, A("p(a,Y)"))


def test_merge_empty_delta_is_identity():
    store = TableStore()
    add_answer(store, A("p(a,Y)"), A("p(a,b)"), DeltaSet())
    mark_complete(store, A("r"))
    assert merge_delta(store, DeltaSet()).snapshot() == store.snapshot()


def test_merge_is_monotone_and_keeps_flags():
    store = TableStore()
    add_answer(store, A("p(a,Y)"), A("p(a,b)"), DeltaSet())
    mark_complete(store, A("r"))
    other, delta = store.copy(), DeltaSet()
    add_answer(other, A("p(a,Y)"), A("p(a,c)"), delta)
    merged = merge_delta(store, delta)
    assert [str(a) for a in lookup(merged, A("p(a,Y)")).ans] == ["p(a,b)", "p(a,c)"]
    assert lookup(merged, A("r")).comp
    assert [str(a) for a in lookup(store, A("p(a,Y)")).ans] == ["p(a,b)"]


def test_dump_format():
    store = TableStore()
    add_answer(store, A("p(a,Y)"), A("p(a,b)"), DeltaSet())
    mark_complete(store, A("r"))
    assert store.dump() == "p(a,Y): comp=0 ans={p(a,b)}\nr: comp=1 ans={}\n"


def test_delta_ignores_repeats():
    delta = DeltaSet()
    assert delta.add("k", A("p(a)"))
    assert not delta.add("k", A("p(a)"))
    assert len(delta) == 1
