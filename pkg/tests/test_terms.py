import pytest

from sltnf.terms import (
    EMPTY,
    LOOP,
    USTAR,
    Atom,
    Clause,
    Compound,
    Const,
    Goal,
    Literal,
    Substitution,
    Var,
    apply,
    atom_size,
    canonical_key,
    is_instance,
    is_variant,
    match,
    mgu,
    rename_apart,
    term_size,
)

X, Y, Z, U, V = (Var(n) for n in "XYZUV")
a, b = Const("a"), Const("b")


def p(*args):
    return Atom("p", args)


def f(*args):
    return Compound("f", args)


class TestConstruction:
    def test_empty_names_rejected(self):
        with pytest.raises(ValueError):
            Var("")
        with pytest.raises(ValueError):
            Const("")
        with pytest.raises(ValueError):
            Atom("")

    def test_compound_needs_arguments(self):
        with pytest.raises(ValueError):
            Compound("f", ())

    def test_clause_body_rejects_markers(self):
        with pytest.raises(ValueError):
            Clause(Atom("p"), (USTAR,))

    def test_indicator_distinguishes_arity(self):
        assert Atom("p").indicator != p(a).indicator

    def test_variables_in_order(self):
        assert p(Y, f(X, Y), Z).variables == (Y, X, Z)


class TestMgu:
    def test_constant_bindings(self):
        assert mgu(p(X, b), p(a, Y)) == Substitution({X: a, Y: b})

    def test_occurs_check(self):
        assert mgu(p(X), p(f(X))) is None

    def test_occurs_check_can_be_disabled(self):
        assert mgu(p(X), p(f(X)), occurs_check=False) is not None

    def test_predicate_clash(self):
        assert mgu(p(a), Atom("q", (a,))) is None

    def test_arity_clash(self):
        assert mgu(p(a), p(a, b)) is None

    def test_constant_clash(self):
        assert mgu(p(a), p(b)) is None

    def test_propositions_unify_with_empty(self):
        assert mgu(Atom("r"), Atom("r")) == EMPTY

    def test_result_is_idempotent_and_unifies(self):
        s, t = p(X, f(Y), Y), p(f(Z), X, a)
        theta = mgu(s, t)
        assert apply(s, theta) == apply(t, theta)
        assert theta.is_idempotent()
        assert apply(apply(s, theta), theta) == apply(s, theta)


class TestApply:
    def test_partial(self):
        assert apply(p(X, Y), Substitution({X: a})) == p(a, Y)

    def test_markers_unchanged(self):
        assert apply(USTAR, Substitution({X: a})) is USTAR
        assert apply(LOOP, Substitution({X: a})) is LOOP

    def test_simultaneous(self):
        theta = Substitution({X: f(Y), Y: b})
        assert apply(f(X), theta) == f(f(Y))

    def test_goal(self):
        g = Goal.of(p(X), Literal(Atom("q", (X,)), negative=True), USTAR)
        out = apply(g, Substitution({X: a}))
        assert str(out) == "p(a), not q(a), u*"

    def test_identity_bindings_dropped(self):
        assert len(Substitution({X: X, Y: a})) == 1

    def test_rejects_unknown(self):
        with pytest.raises(TypeError):
            apply(object(), Substitution({X: a}))

    def test_compose(self):
        s = Substitution({X: Y}).compose(Substitution({Y: a}))
        assert apply(p(X, Y), s) == p(a, a)


class TestVariants:
    def test_renaming(self):
        assert is_variant(p(X, Y), p(U, V))

    def test_shared_pattern_differs(self):
        assert not is_variant(p(X, X), p(U, V))
        assert not is_variant(p(U, V), p(X, X))

    def test_with_constant(self):
        assert is_variant(p(a, Y), p(a, Z))

    def test_keys_follow_variance(self):
        assert canonical_key(p(X, Y)) == canonical_key(p(U, V))
        assert canonical_key(p(X, X)) != canonical_key(p(X, Y))
        assert canonical_key(p(a, Y)) != canonical_key(p(Y, a))

    def test_instance(self):
        assert is_instance(p(X, Y), p(a, a))
        assert not is_instance(p(X, X), p(a, b))
        assert match(p(X, b), p(a, b)) == Substitution({X: a})
        assert match(p(a), p(X)) is None


class TestRenameApart:
    def test_clashing_variable_renamed(self):
        c = Clause(p(X), (Literal(Atom("q", (X,))),))
        out = rename_apart(c, {X})
        assert str(out) == "p(X1) :- q(X1)."

    def test_ground_clause_unchanged(self):
        c = Clause(p(a))
        assert rename_apart(c, set()) is c

    def test_partial_renaming(self):
        c = Clause(p(X, Y), (Literal(Atom("q", (Y,))),))
        out = rename_apart(c, {Y})
        assert is_variant(out.head, c.head)
        assert Y not in out.variables
        assert X in out.variables


class TestSizes:
    def test_constant(self):
        assert term_size(a) == 1

    def test_compound(self):
        assert term_size(f(a, b)) == 3

    def test_nested(self):
        assert term_size(Compound("f", (Compound("g", (X,)),))) == 3

    def test_atom_size_is_largest_argument(self):
        assert atom_size(p(a, f(a, b))) == 3
        assert atom_size(Atom("r")) == 0
