import itertools

import pytest
from hypothesis import given, settings, strategies as st

from holeforge.constraints import (
    EMPTY, ConstraintSet, Inconsistent, Subst, consistent, entails, instantiate, solve_for,
    try_unify, unify,
)
from holeforge.oracle import brute_force_enumerate
from holeforge.parser import scheme_of
from holeforge.syntax import Arrow, Equality, FreshSupply, TCon, TVar, UVar, Var, free_uvars

INT = TCon("Int")
BOOL = TCon("Bool")
a1, a2, g1, g2 = UVar(1), UVar(2), UVar(3), UVar(4)


def lst(t):
    return TCon("List", (t,))


MAP_CONSTRAINTS = [
    Equality(Arrow(a2, Arrow(a1, lst(BOOL))), Arrow(Arrow(g1, g2), Arrow(lst(g1), lst(g2)))),
    Equality(Arrow(g1, g2), Arrow(INT, BOOL)),
    Equality(a1, lst(INT)),
]


def test_empty_set_has_the_empty_unifier():
    assert unify([]) == Subst()
    assert consistent([])


def test_clash_is_inconsistent():
    with pytest.raises(Inconsistent):
        unify([Equality(INT, BOOL)])
    assert not consistent([Equality(INT, BOOL)])


def test_map_derivation_unifier():
    theta = unify(MAP_CONSTRAINTS)
    assert theta.apply(a2) == Arrow(INT, BOOL)
    assert theta.apply(a1) == lst(INT)
    assert theta.apply(g1) == INT
    assert theta.apply(g2) == BOOL
    assert consistent(MAP_CONSTRAINTS)


def test_occurs_check():
    with pytest.raises(Inconsistent) as e:
        unify([Equality(a1, lst(a1))])
    assert e.value.occurs
    assert "occurs check" in str(e.value)


def test_entailment():
    c = ConstraintSet([Equality(a1, lst(g1)), Equality(g1, INT)])
    assert entails(c, Equality(a1, lst(INT)))
    assert entails(EMPTY, Equality(a1, a1))
    assert not entails(ConstraintSet.given([Equality(TVar("a"), INT)]), Equality(TVar("a"), BOOL))


def test_solve_for():
    c = ConstraintSet(MAP_CONSTRAINTS)
    assert solve_for(c, a1) == lst(INT)
    assert solve_for(ConstraintSet.given([Equality(TVar("a"), INT)]), TVar("a")) == INT
    assert solve_for(EMPTY, BOOL) == BOOL


def test_rigid_variables_only_bend_to_givens():
    a = TVar("a")
    assert not ConstraintSet([Equality(a, INT)]).consistent
    assert ConstraintSet.given([Equality(a, INT)]).consistent
    assert not ConstraintSet([Equality(a, BOOL)], [Equality(a, INT)]).consistent


def test_instantiate_map():
    s = scheme_of("(a -> b) -> [a] -> [b]")
    body, bundled, theta = instantiate(s, FreshSupply(10))
    assert bundled == []
    alpha, beta = theta.apply(TVar("a")), theta.apply(TVar("b"))
    assert isinstance(alpha, UVar) and isinstance(beta, UVar) and alpha != beta
    assert body == Arrow(Arrow(alpha, beta), Arrow(lst(alpha), lst(beta)))


def test_instantiate_plus_carries_its_equality():
    s = scheme_of("(b ~ Int) => Exp Int -> Exp Int -> Exp b")
    body, bundled, theta = instantiate(s, FreshSupply())
    beta = theta.apply(TVar("b"))
    assert bundled == [Equality(beta, INT)]
    assert body.cod.cod == TCon("Exp", (beta,))


def test_instantiate_monomorphic_is_unchanged():
    s = scheme_of("Int -> Bool")
    body, bundled, _ = instantiate(s, FreshSupply())
    assert body == s.body and bundled == []


# ---------------------------------------------------------------------------
# properties

leaf = st.one_of(st.sampled_from([INT, BOOL]), st.integers(1, 4).map(UVar))
types = st.recursive(
    leaf,
    lambda inner: st.one_of(
        st.builds(Arrow, inner, inner),
        st.builds(lambda t: TCon("Maybe", (t,)), inner),
        st.builds(lst, inner)),
    max_leaves=6)
eqs = st.builds(Equality, types, types)
eq_lists = st.lists(eqs, max_size=5)


@given(eq_lists)
def test_unifier_is_idempotent_and_equates(es):
    c = ConstraintSet(es)
    if not c.consistent:
        return
    theta = c.subst
    for e in es:
        assert theta.apply(e.lhs) == theta.apply(e.rhs)
    for t in theta.mapping.values():
        assert theta.apply(t) == t
    for k in theta.mapping:
        assert not (free_uvars(theta.mapping[k]) & {k.id})


@given(eq_lists)
def test_order_and_orientation_do_not_matter(es):
    flipped = [Equality(e.rhs, e.lhs) for e in reversed(es)]
    c1, c2 = ConstraintSet(es), ConstraintSet(flipped)
    assert c1.consistent == c2.consistent
    if c1.consistent:
        assert c1.subst == c2.subst


@given(eq_lists, eq_lists)
def test_consistency_is_antitone(es, more):
    # a consistent set stays consistent when equalities are removed
    big = ConstraintSet(es + more)
    if big.consistent:
        assert ConstraintSet(es).consistent


@given(eq_lists, eqs, eq_lists)
def test_entailment_survives_weakening(es, e, more):
    c = ConstraintSet(es)
    big = c.add_wanted(more)
    if c.consistent and big.consistent and entails(c, e):
        assert entails(big, e)


@given(eq_lists, types)
def test_solve_for_is_idempotent(es, t):
    c = ConstraintSet(es)
    if c.consistent:
        once = solve_for(c, t)
        assert solve_for(c, once) == once


@given(eq_lists, eq_lists)
def test_incremental_extension_matches_one_shot(es, more):
    inc = ConstraintSet(es).add_wanted(more)
    whole = ConstraintSet(es + more)
    assert inc.consistent == whole.consistent
    if whole.consistent:
        # both are most general, so they agree on every type up to renaming
        for e in es + more:
            assert entails(inc, e) and entails(whole, e)


@given(eq_lists)
def test_try_unify_agrees_with_constraint_sets(es):
    theta = try_unify([(e.lhs, e.rhs) for e in es])
    assert (theta is not None) == ConstraintSet(es).consistent


@given(eq_lists)
@settings(max_examples=200)
def test_unifier_is_most_general(es):
    """Any ground solution found by enumeration factors through the mgu:
    instantiating the mgu's leftover variables reproduces it."""
    c = ConstraintSet(es)
    vars_ = sorted({v for e in es for v in free_uvars(e)})
    if not vars_ or len(vars_) > 3:
        return
    ground = [INT, BOOL, lst(INT), Arrow(INT, BOOL)]
    for choice in itertools.product(ground, repeat=len(vars_)):
        sigma = Subst({UVar(v): t for v, t in zip(vars_, choice)})
        if all(sigma.apply(e.lhs) == sigma.apply(e.rhs) for e in es):
            assert c.consistent
            theta = c.subst
            # sigma = sigma . theta on every variable
            for v in vars_:
                assert sigma.apply(theta.apply(UVar(v))) == sigma.apply(UVar(v))


def test_oracle_respects_local_equalities():
    from holeforge.program import default_prelude
    ctx = default_prelude().ctx.with_vars([("n", scheme_of("Int"))])
    a = TVar("a")
    found = brute_force_enumerate(ctx, a, 1, ["n"], ConstraintSet.given([Equality(a, INT)]))
    assert found == {Var("n")}
    assert brute_force_enumerate(ctx, a, 1, ["n"]) == set()
