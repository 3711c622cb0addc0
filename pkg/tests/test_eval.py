from hypothesis import given, strategies as st

from holeforge.evaluate import (
    CONTRADICTED, SATISFIED, UNKNOWN, UNKNOWN_CALL, Evaluator, ExampleFn, OutOfFuel, Stuck, Val,
    combine, example_table,
)
from holeforge.parser import parse_example_row, parse_expr_text, scheme_of
from holeforge.program import default_prelude
from holeforge.syntax import CtorV, PolyConstV, ValueEnv, World, value_to_example

PRELUDE = default_prelude()
EV = Evaluator(PRELUDE.arities)


def run(text, env=ValueEnv(), fuel=10_000):
    return EV.run(env, parse_expr_text(text), fuel)


def lst(*items):
    v = CtorV("[]")
    for x in reversed(items):
        v = CtorV(":", (x, v))
    return v


A1, A2 = PolyConstV("a1"), PolyConstV("a2")
STUTTER = "\\l -> case l of { [] -> l; (:) a1 l2 -> (:) a1 ((:) a1 (stutter l2)) }"


def test_beta():
    env = ValueEnv({"v": A1})
    assert run("(\\x -> x) v", env) == Val(A1)


def test_stutter_needs_a_sub_example_for_its_recursive_call():
    row = parse_example_row("stutter [a1, a2] = [a1, a1, a2, a2]", scheme_of("[a] -> [a]"))
    _, table = example_table([row])
    env = ValueEnv({"stutter": ExampleFn("stutter", 1, table)})
    r = EV.apply_value(run(STUTTER, env).value, [lst(A1, A2)])
    assert isinstance(r, Stuck) and r.reason == UNKNOWN_CALL

    sub = parse_example_row("stutter [a2] = [a2, a2]", scheme_of("[a] -> [a]"))
    _, table = example_table([row, sub])
    env = ValueEnv({"stutter": ExampleFn("stutter", 1, table)})
    r = EV.apply_value(run(STUTTER, env).value, [lst(A1, A2)])
    assert r == Val(lst(A1, A1, A2, A2))


def test_case_on_nothing():
    env = ValueEnv({"m1": CtorV("Nothing"), "s1": PolyConstV("c1")})
    assert run("case m1 of { Nothing -> s1; Just a1 -> a1 }", env) == Val(PolyConstV("c1"))


FROM_MAYBE = scheme_of("a -> Maybe a -> a")
ROW_NOTHING = parse_example_row("fromMaybe a1 Nothing = a1", FROM_MAYBE)
ROW_JUST = parse_example_row("fromMaybe a1 (Just a2) = a2", FROM_MAYBE)


def test_bare_argument_contradicts_the_just_row():
    cand = parse_expr_text("\\s1 -> \\m1 -> s1")
    assert EV.satisfies(ValueEnv(), cand, ROW_JUST) == CONTRADICTED
    assert EV.satisfies(ValueEnv(), cand, ROW_NOTHING) == SATISFIED


def test_case_candidate_satisfies_both_rows():
    cand = parse_expr_text("\\s1 -> \\m1 -> case m1 of { Nothing -> s1; Just a1 -> a1 }")
    assert combine(EV.satisfies(ValueEnv(), cand, r) for r in [ROW_NOTHING, ROW_JUST]) == SATISFIED


def test_running_out_of_fuel_is_unknown():
    omega = parse_expr_text("(\\x -> x x) (\\x -> x x)")
    assert EV.run(ValueEnv(), omega, 500) == OutOfFuel()
    assert EV.satisfies(ValueEnv(), omega, value_to_example(CtorV("True")), 500) == UNKNOWN


def test_filter_worlds():
    w1 = World(ValueEnv({"m1": CtorV("Nothing")}), value_to_example(A1))
    w2 = World(ValueEnv({"m1": CtorV("Just", (A2,))}), value_to_example(A2))
    m1 = parse_expr_text("m1")
    assert EV.filter_worlds([w1, w2], "Just", m1) == [w2]
    assert EV.filter_worlds([w1, w2], "Nothing", m1) == [w1]
    assert EV.filter_worlds([w1, w2], "True", m1) == []
    # a scrutinee that calls the recursive function outside its examples
    env = ValueEnv({"f": ExampleFn("f", 1, {}), "m1": CtorV("Nothing")})
    assert EV.filter_worlds([World(env, value_to_example(A1))], "Just", parse_expr_text("f m1")) is None


# ---------------------------------------------------------------------------
# properties

values = st.recursive(
    st.sampled_from([CtorV("True"), CtorV("False"), CtorV("Nothing"), CtorV("[]"), A1]),
    lambda inner: st.one_of(
        st.builds(lambda v: CtorV("Just", (v,)), inner),
        st.builds(lambda h, t: CtorV(":", (h, t)), inner, inner)),
    max_leaves=6)

PROGRAMS = [
    "\\x -> x",
    "\\x -> case x of { Nothing -> True; Just y -> False }",
    "\\x -> Just x",
    "\\x -> case x of { [] -> x; (:) h t -> t }",
    "\\x -> (\\f -> f (f x)) (\\y -> Just y)",
]


@given(values)
def test_value_satisfies_itself(v):
    assert EV.value_satisfies(v, value_to_example(v)) == SATISFIED


@given(st.sampled_from(PROGRAMS), values)
def test_evaluation_is_deterministic(text, v):
    fn = run(text).value
    assert EV.apply_value(fn, [v]) == EV.apply_value(fn, [v])


@given(st.sampled_from(PROGRAMS), values, st.integers(0, 6), st.integers(0, 20))
def test_more_fuel_never_changes_a_result(text, v, fuel, extra):
    fn = run(text).value
    small = EV.apply_value(fn, [v], fuel)
    if isinstance(small, Val):
        assert EV.apply_value(fn, [v], fuel + extra) == small


@given(st.lists(values, max_size=5))
def test_filtering_partitions_the_worlds(vs):
    worlds = [World(ValueEnv({"x": v}), value_to_example(v)) for v in vs]
    x = parse_expr_text("x")
    parts = [EV.filter_worlds(worlds, k, x) for k in ["True", "False", "Nothing", "Just", "[]", ":"]]
    parts.append([w for w in worlds if w.env.lookup("x") == A1])
    assert sorted(id(w) for p in parts for w in p) == sorted(id(w) for w in worlds)
