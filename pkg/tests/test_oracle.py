import random

import pytest

from sltnf.fuzz import case_rng, random_program
from sltnf.oracle import (
    GroundingError,
    GroundProgram,
    Truth,
    classify,
    gamma,
    ground,
    least_model,
    reduct,
    wf_model,
)
from sltnf.parser import parse_atom, parse_program


def atoms(*texts):
    return frozenset(parse_atom(t) for t in texts)


def test_ground_p1(p1):
    g = ground(p1)
    first = [c for c in g if c.head.predicate == "p" and len(c.body) == 2 and c.body[0].atom.predicate == "p"]
    assert len(first) == 27
    assert len(g.base) == 9 + 9 + 2


def test_ground_already_ground():
    prog = parse_program("p :- not q. q.")
    assert list(ground(prog)) == list(prog)


def test_ground_rejects_function_symbols():
    with pytest.raises(GroundingError):
        ground(parse_program("p(f(X))."))


def test_ground_without_constants_uses_dummy():
    g = ground(parse_program("p(X) :- q(X)."))
    assert [str(c) for c in g] == ["p(d) :- q(d)."]


def test_ground_program_must_be_ground():
    with pytest.raises(ValueError):
        GroundProgram(tuple(parse_program("p(X).")), frozenset())


def test_mutual_negation():
    m = wf_model(ground(parse_program("p :- not q. q :- not p.")))
    assert m.undefined_atoms == atoms("p", "q")
    assert not m.true_atoms and not m.false_atoms


def test_self_loop_false():
    assert wf_model(ground(parse_program("p :- p."))).false_atoms == atoms("p")


def test_p1_model(p1):
    m = wf_model(ground(p1))
    assert m.true_atoms == atoms("p(a,b)", "p(a,c)", "e(a,b)", "e(b,c)", "p(b,c)")
    assert m.undefined_atoms == atoms("s")
    assert parse_atom("r") in m.false_atoms
    assert m.base == ground(p1).base
    assert classify(m, parse_atom("r")) is Truth.FALSE
    assert classify(m, parse_atom("s")) is Truth.UNDEFINED
    assert classify(m, parse_atom("p(a,c)")) is Truth.TRUE


def test_classify_outside_base_is_false(p1):
    assert classify(wf_model(p1), parse_atom("zzz")) is Truth.FALSE


def test_classify_needs_ground(p1):
    with pytest.raises(ValueError):
        classify(wf_model(p1), parse_atom("p(a,Y)"))


def test_least_model_rejects_negation():
    with pytest.raises(ValueError):
        least_model(parse_program("p :- not q."))


def test_reduct():
    prog = parse_program("p :- q, not r. s :- not t.")
    assert [str(c) for c in reduct(prog, atoms("r"))] == ["s."]


def _bottom_up(program) -> frozenset:
    """Reference least model by repeated immediate consequence on sets."""
    model: frozenset = frozenset()
    while True:
        step = frozenset(c.head for c in program if all(lit.atom in model for lit in c.body))
        if step == model:
            return model
        model = step


def _corpus(n, negation_probability=0.4, seed=7):
    return [random_program(case_rng(seed, i), 6, 12, 3, negation_probability) for i in range(n)]


def _subsets(base, rng):
    items = sorted(base, key=str)
    s = frozenset(x for x in items if rng.random() < 0.5)
    t = s | frozenset(x for x in items if rng.random() < 0.5)
    return s, t


@pytest.mark.parametrize("prog", _corpus(120), ids=lambda p: f"{len(p)}cl")
def test_gamma_antimonotone_gamma2_monotone(prog):
    g = ground(prog)
    rng = random.Random(str(prog))
    for _ in range(5):
        s, t = _subsets(g.base, rng)
        assert gamma(g, t) <= gamma(g, s)
        assert gamma(g, gamma(g, s)) <= gamma(g, gamma(g, t))


@pytest.mark.parametrize("prog", _corpus(120, seed=8), ids=lambda p: f"{len(p)}cl")
def test_lfp_within_gfp_and_partition(prog):
    g = ground(prog)
    m = wf_model(g)
    lfp = m.true_atoms
    gfp = m.true_atoms | m.undefined_atoms
    assert lfp <= gfp
    assert gamma(g, gamma(g, lfp)) == lfp
    assert gamma(g, gamma(g, gfp)) == gfp
    assert not (m.true_atoms & m.false_atoms)
    assert not (m.true_atoms & m.undefined_atoms)
    assert not (m.false_atoms & m.undefined_atoms)


@pytest.mark.parametrize("prog", _corpus(120, negation_probability=0.0, seed=9), ids=lambda p: f"{len(p)}cl")
def test_definite_programs_two_valued(prog):
    m = wf_model(prog)
    assert not m.undefined_atoms
    assert m.true_atoms == _bottom_up(prog)
