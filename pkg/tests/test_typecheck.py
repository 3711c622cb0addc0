import random

from hypothesis import given, settings, strategies as st

from holeforge.constraints import EMPTY, ConstraintSet
from holeforge.oracle import brute_force_enumerate, component_heads, typed_trees
from holeforge.parser import parse_expr_text, scheme_of
from holeforge.program import default_prelude
from holeforge.syntax import (
    Arrow, ConstEx, CtorEx, CtorV, Equality, FreshSupply, IOEx, PolyConstV, TCon, TVar,
    TopExample, UVar,
)
from holeforge.typecheck import (
    check_example, check_expr, check_scheme, check_top_example, infer_binding, infer_expr,
)

PRELUDE = default_prelude()
INT, BOOL = TCon("Int"), TCon("Bool")


def ctx_with(**sigs):
    return PRELUDE.ctx.with_vars([(k, scheme_of(v)) for k, v in sigs.items()])


MAP_CTX = ctx_with(map="(a -> b) -> [a] -> [b]", isEven="Int -> Bool", l="[Int]")


def test_identity_infers_an_arrow_between_equal_types():
    t, c = infer_expr(PRELUDE.ctx, parse_expr_text("\\x -> x"), FreshSupply())
    t = c.solve(t)
    assert isinstance(t, Arrow) and t.dom == t.cod and isinstance(t.dom, UVar)


def test_map_is_even_l():
    t, c = infer_expr(MAP_CTX, parse_expr_text("map isEven l"), FreshSupply())
    assert c.consistent
    assert c.solve(t) == TCon("List", (BOOL,))


def test_case_result_is_forced_to_the_element_type():
    alpha = UVar(1)
    ctx = PRELUDE.ctx.with_vars([("m", _mono(TCon("Maybe", (alpha,)))), ("s", _mono(alpha))])
    t, c = infer_expr(ctx, parse_expr_text("case m of { Nothing -> s; Just a -> a }"), FreshSupply(10))
    assert c.consistent and c.solve(t) == c.solve(alpha)


def _mono(t):
    from holeforge.syntax import Scheme
    return Scheme.mono(t)


def test_bindings_generalize():
    assert infer_binding(PRELUDE.ctx, "f", parse_expr_text("\\x -> x"), FreshSupply()) == scheme_of("a -> a")
    s = infer_binding(MAP_CTX, "f", parse_expr_text("\\g -> \\k -> map g k"), FreshSupply())
    assert s == scheme_of("(a -> b) -> [a] -> [b]")
    assert infer_binding(PRELUDE.ctx, "f", parse_expr_text("(\\x -> x) True"), FreshSupply()) == scheme_of("Bool")


def test_check_identity_at_unequal_types_fails():
    assert not check_expr(EMPTY, PRELUDE.ctx, parse_expr_text("\\x -> x"), Arrow(INT, BOOL))
    assert check_expr(EMPTY, PRELUDE.ctx, parse_expr_text("\\x -> x"), Arrow(INT, INT))


def test_given_equalities_rewrite_the_goal():
    a = TVar("a")
    c = ConstraintSet.given([Equality(a, INT)])
    ctx = ctx_with(n="Int", plus="Int -> Int -> Int")
    for text in ["n", "plus n n", "True", "\\x -> x"]:
        e = parse_expr_text(text)
        assert check_expr(c, ctx, e, a) == check_expr(c, ctx, e, INT)


def test_examples():
    ctx = PRELUDE.ctx.with_poly_consts([("c1", "a"), ("c2", "a")])
    a = TVar("a")
    assert check_example(ctx, ConstEx("c1"), a)
    row = IOEx(PolyConstV("c1"), IOEx(CtorV("Just", (PolyConstV("c2"),)), ConstEx("c2")))
    assert check_example(ctx, row, scheme_of("a -> Maybe a -> a").body)
    one = CtorEx("Lit", (CtorEx("1"),))
    assert not check_example(ctx, CtorEx("Plus", (one, one)), TCon("Exp", (BOOL,)))
    assert check_example(ctx, CtorEx("Plus", (one, one)), TCon("Exp", (INT,)))


def test_top_examples():
    s = scheme_of("a -> Maybe a -> a")
    rows = (IOEx(PolyConstV("c1"), IOEx(CtorV("Nothing"), ConstEx("c1"))),
            IOEx(PolyConstV("c1"), IOEx(CtorV("Just", (PolyConstV("c2"),)), ConstEx("c2"))))
    assert check_top_example(PRELUDE.ctx, TopExample((("c1", "a"), ("c2", "a")), rows), s)
    two = scheme_of("a -> b -> a")
    bad = (IOEx(PolyConstV("c1"), IOEx(PolyConstV("c2"), ConstEx("c2"))),)
    assert not check_top_example(PRELUDE.ctx, TopExample((("c1", "a"), ("c2", "b")), bad), two)
    mono = (IOEx(CtorV("True"), CtorEx("False")),)
    assert check_top_example(PRELUDE.ctx, TopExample((), mono), scheme_of("Bool -> Bool"))


# ---------------------------------------------------------------------------
# the checker agrees with principal types computed independently

POOL = ctx_with(id="a -> a", const="a -> b -> a", map="(a -> b) -> [a] -> [b]", n="Int")
NAMES = ["id", "const", "map", "n", "True", "Just", "Nothing", ":", "[]"]
GOALS = [scheme_of(t).body for t in ["Bool", "Int", "Maybe Int", "[Bool]", "Int -> Int"]]


def test_checker_agrees_with_principal_types():
    from holeforge.constraints import try_unify
    rng = random.Random(3)
    for _ in range(30):
        names = rng.sample(NAMES, 3)
        trees = typed_trees(POOL, component_heads(POOL, names), 5)
        for goal in GOALS:
            for e, t in trees:
                assert check_expr(EMPTY, POOL, e, goal) == (try_unify([(t, goal)]) is not None)


@given(st.sampled_from(NAMES), st.sampled_from(GOALS), st.sampled_from(["b", "c", "d"]))
@settings(max_examples=60)
def test_extra_context_entries_do_not_break_checking(name, goal, extra):
    # weakening: anything typed in a context stays typed in a larger one
    for e in brute_force_enumerate(POOL, goal, 5, [name, "n"]):
        assert check_expr(EMPTY, POOL.with_var(extra, scheme_of("Bool")), e, goal)


def test_scheme_check_keeps_variables_rigid():
    ctx = ctx_with(n="Int")
    assert not check_scheme(ctx, parse_expr_text("\\x -> n"), scheme_of("a -> a"))
    assert check_scheme(ctx, parse_expr_text("\\x -> x"), scheme_of("a -> a"))
