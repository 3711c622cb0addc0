import pytest
from hypothesis import given, settings, strategies as st

from holeforge.constraints import EMPTY, ConstraintSet
from holeforge.evaluate import Evaluator
from holeforge.oracle import brute_force_enumerate
from holeforge.parser import scheme_of
from holeforge.pretty import show_inline
from holeforge.program import default_prelude, load_text
from holeforge.synth import (
    OK, GenState, Scope, SearchBudget, Synthesizer, Tracer, _levels, synthesize_binding,
)
from holeforge.syntax import (
    App, Case, CtorEx, Equality, Lam, TCon, TVar, ValueEnv, Var, World, count_apps, spine,
)
from holeforge.typecheck import check_expr

from support import load_corpus

PRELUDE = default_prelude()


def engine(ctx, comps=(), tracer=None):
    return Synthesizer(ctx, list(comps), Evaluator(PRELUDE.arities), tracer=tracer)


def generated(eng, goal, scope=Scope(), depth=2, c=EMPTY):
    return [show_inline(e) for e, _ in eng.generate(GenState(c, eng.supply, depth), scope, goal)]


def test_rigid_goal_yields_exactly_the_matching_locals():
    a = TVar("a")
    scope = Scope(locals=(("s1", a), ("m1", TCon("Maybe", (a,)))))
    assert generated(engine(PRELUDE.ctx), a, scope) == ["s1"]


def test_nothing_comes_from_nothing():
    assert generated(engine(PRELUDE.ctx), TCon("Int")) == []


def test_applications_respect_the_budget():
    ctx = PRELUDE.ctx.with_vars([("f", scheme_of("a -> a"))])
    eng = engine(ctx, [("f", "var"), ("True", "ctor")])
    for depth in range(4):
        out = list(eng.generate(GenState(EMPTY, eng.supply, depth), Scope(), TCon("Bool")))
        assert out and all(count_apps(e) <= depth for e, _ in out)
        # f f True is as good as f (f True)
        assert {e for e, _ in out} == brute_force_enumerate(ctx, TCon("Bool"), 2 * depth + 1, ["f", "True"])


def test_refine_data_splits_worlds_by_argument():
    p = load_text("data T = K Int Bool Int\n")
    eng = Synthesizer(p.ctx, [], Evaluator(p.arities))
    worlds = [World(ValueEnv(), CtorEx("K", (CtorEx("1"), CtorEx("True"), CtorEx("2"))))]
    out = [show_inline(e) for e in eng.refine(EMPTY, Scope(), TCon("T"), worlds, 0, 0)]
    assert out == ["K 1 True 2"]


def test_refine_data_needs_every_world_to_agree():
    p = load_text("data T = K Int Bool Int\n")
    eng = Synthesizer(p.ctx, [], Evaluator(p.arities))
    worlds = [World(ValueEnv(), CtorEx("K", (CtorEx("1"), CtorEx("True"), CtorEx("2")))),
              World(ValueEnv(), CtorEx("K", (CtorEx("1"), CtorEx("False"), CtorEx("2"))))]
    assert eng.refine(EMPTY, Scope(), TCon("T"), worlds, 0, 0) == []


def test_rigid_goal_is_rewritten_by_a_given():
    a = TVar("a")
    tracer = Tracer()
    eng = engine(PRELUDE.ctx, tracer=tracer)
    c = ConstraintSet.given([Equality(a, TCon("Int"))])
    out = eng.refine(c, Scope(locals=(("n", TCon("Int")),)), a, [], 0, 0)
    assert [show_inline(e) for e in out] == ["n"]
    assert any(rule == "refine-gadt-unify" for rule, _ in tracer.events)


def test_branch_without_worlds_is_filled_from_types():
    p = load_corpus("fromMaybe.syn")
    eng = Synthesizer(p.ctx, [], Evaluator(p.arities))
    a = TVar("a")
    scope = Scope(locals=(("s1", a), ("m1", TCon("Maybe", (a,)))))
    branches = eng.refine_match(EMPTY, scope, "m1", (a,), "Just", a, [], 0, 0)
    assert {show_inline(b.body) for b in branches} == {"s1", branches[0].binders[0]}


def test_levels_exhaust_applications_before_cases():
    assert _levels(SearchBudget(1, 1, 5)) == [(0, 0), (0, 1), (1, 0), (1, 1)]


# ---------------------------------------------------------------------------
# whole goals

def test_ranking_puts_ok_first_then_smaller():
    p = load_text("f :: Bool -> Bool\nf b = _\n")
    cands = synthesize_binding(p, p.goals[0], SearchBudget(1, 1, 20))
    ranks = [(c.verdict != OK, c.size, show_inline(c.body)) for c in cands]
    assert ranks == sorted(ranks)


def test_max_candidates_caps_the_list():
    p = load_text("f :: Bool -> Bool\nf b = _\n")
    assert len(synthesize_binding(p, p.goals[0], SearchBudget(1, 1, 2))) == 2


def test_synthesis_is_deterministic():
    p = load_corpus("stutter.syn")
    first = [(c.verdict, show_inline(c.body)) for c in synthesize_binding(p, p.goals[0])]
    assert [(c.verdict, show_inline(c.body)) for c in synthesize_binding(p, p.goals[0])] == first


@pytest.mark.parametrize("file", ["stutter.syn", "append.syn", "eval.syn"])
def test_recursive_calls_shrink_the_decreasing_argument(file):
    p = load_corpus(file)
    goal = p.goals[0]

    def calls(e, bound):
        match e:
            case Lam(_, b):
                yield from calls(b, bound)
            case Case(scrut, branches):
                yield from calls(scrut, bound)
                for b in branches:
                    yield from calls(b.body, bound | set(b.binders))
            case App() | Var():
                head, args = spine(e)
                if head == Var(goal.name):
                    yield args, bound
                for a in args:
                    yield from calls(a, bound)

    seen = 0
    for c in synthesize_binding(p, goal):
        for args, bound in calls(c.body, frozenset()):
            seen += 1
            # saturated up to the decreasing argument, which a match bound
            arg = args[goal.options.rec_arg]
            assert isinstance(arg, Var) and arg.name in bound
    assert seen


def test_map_goal_uses_map():
    p = load_corpus("map.syn")
    (first, *_) = synthesize_binding(p, p.goals[0])
    assert show_inline(first.body) == "map isEven l"


def test_eval_goal_finds_the_gadt_interpreter_shape():
    p = load_corpus("eval.syn")
    cands = synthesize_binding(p, p.goals[0])
    assert cands and all(c.verdict == OK for c in cands)
    body = show_inline(cands[0].body)
    assert body.startswith("case e of { Lit a1 -> a1; Plus ")


# ---------------------------------------------------------------------------
# generation properties

POOL = PRELUDE.ctx.with_vars([
    ("id", scheme_of("a -> a")), ("const", scheme_of("a -> b -> a")),
    ("map", scheme_of("(a -> b) -> [a] -> [b]")), ("n", scheme_of("Int")),
    ("not", scheme_of("Bool -> Bool")),
])
NAMES = [("id", "var"), ("const", "var"), ("map", "var"), ("n", "var"), ("not", "var"),
         ("True", "ctor"), ("Just", "ctor"), (":", "ctor"), ("[]", "ctor"), ("Plus", "ctor"), ("Lit", "ctor")]
GOALS = ["Bool", "Int", "Maybe Int", "[Bool]", "Exp Int", "Exp a", "a -> a", "Maybe a"]


@given(st.lists(st.sampled_from(NAMES), min_size=1, max_size=4, unique=True),
       st.sampled_from(GOALS), st.integers(0, 3))
@settings(max_examples=150, deadline=None)
def test_generated_terms_check_and_constraints_only_grow(comps, goal_text, depth):
    goal = scheme_of(goal_text).body
    tracer = Tracer()
    eng = Synthesizer(POOL, comps, Evaluator(PRELUDE.arities), tracer=tracer)
    for e, st_ in eng.generate(GenState(EMPTY, eng.supply, depth), Scope(), goal):
        assert st_.constraints.consistent
        assert EMPTY <= st_.constraints
        assert count_apps(e) <= depth
        assert check_expr(EMPTY, POOL, e, goal)
    for _, data in tracer.events:
        if "before" in data:
            assert data["before"] <= data["after"]
