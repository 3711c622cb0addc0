"""Type-and-example-directed synthesis.

Two mutually recursive searches:

* refinement decomposes example worlds along the goal type (lambda,
  constructor, case) and hands the leaves to
* generation, which enumerates variables and applications while threading
  a constraint set: every choice adds equalities and is kept only while the
  set stays consistent, so types are inferred during enumeration instead
  of being guessed up front.

The driver runs refinement under increasing (case depth, application
count) budgets and ranks what it finds.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterator, Optional, Sequence

from .constraints import EMPTY, ConstraintSet, entails, instantiate
from .evaluate import (
    CONTRADICTED, DEFAULT_FUEL, SATISFIED, UNKNOWN, Evaluator, ExampleFn,
    Val, combine,
)
from .pretty import alpha_key, show_equality, show_inline, show_type
from .syntax import (
    App, Arrow, Case, Closure, ConstEx, Context, Ctor, CtorEx, CtorV, Equality,
    Expr, FreshSupply, IOEx, Lam, LIST, MatchBranch, Scheme, TCon, TVar, Type,
    UVar, Var, World, expr_size, rename_rigid, spine, split_arrows,
)

OK = "ok"


# ---------------------------------------------------------------------------
# Public records

@dataclass(frozen=True)
class SearchBudget:
    max_app_depth: int = 3
    max_case_depth: int = 2
    max_candidates: int = 20

    def __post_init__(self):
        if self.max_app_depth < 0 or self.max_case_depth < 0 or self.max_candidates <= 0:
            raise ValueError("search budgets must be positive")


@dataclass(frozen=True)
class GenState:
    constraints: ConstraintSet
    supply: FreshSupply = field(compare=False)
    app_depth: int = 0  # applications still available


@dataclass(frozen=True)
class Candidate:
    expr: Expr  # the whole binding, parameters included
    body: Expr  # what fills the hole
    verdict: str  # ok | unknown
    per_row: tuple = ()

    @property
    def size(self) -> int:
        return expr_size(self.body)


class Tracer:
    """Collects one line per applied rule, plus structured events."""

    def __init__(self, sink: Optional[Callable[[str], None]] = None):
        self.sink = sink
        self.lines: list[str] = []
        self.events: list[tuple] = []

    def __call__(self, rule: str, text: str, **data):
        line = f"{rule}: {text}"
        self.lines.append(line)
        self.events.append((rule, data))
        if self.sink is not None:
            self.sink(line)

    def equalities(self) -> list[Equality]:
        out = []
        for _, data in self.events:
            out.extend(data.get("added", ()))
        return out


@dataclass
class Stats:
    heads_examined: int = 0
    candidates_emitted: int = 0
    levels: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# Scope

@dataclass(frozen=True)
class Scope:
    """Local variables in binding order plus bookkeeping for case and
    recursion guards."""
    locals: tuple = ()  # of (name, Type)
    scrutinized: frozenset = frozenset()
    decreasing: frozenset = frozenset()
    rec_param: Optional[str] = None

    def names(self) -> set[str]:
        return {n for n, _ in self.locals}

    def bind(self, pairs) -> "Scope":
        pairs = tuple(pairs)
        shadowed = {n for n, _ in pairs}
        kept = tuple((n, t) for n, t in self.locals if n not in shadowed)
        return Scope(kept + pairs, self.scrutinized - shadowed, self.decreasing - shadowed,
                     self.rec_param if self.rec_param not in shadowed else None)


def binder_prefix(t: Type) -> str:
    match t:
        case TVar(n):
            return n.rstrip("'") or "x"
        case TCon(h, _):
            if h == LIST:
                return "l"
            return h[0].lower()
        case Arrow():
            return "f"
    return "x"


def fresh_binder(t: Type, taken: set[str]) -> str:
    stem = binder_prefix(t)
    i = 1
    while f"{stem}{i}" in taken:
        i += 1
    return f"{stem}{i}"


# ---------------------------------------------------------------------------
# Engine

class Synthesizer:
    """One synthesis session for one goal. Holds the fresh-name supply, the
    component list and the evaluator; not shared across sessions."""

    def __init__(self, ctx: Context, components: Sequence[tuple[str, str]],
                 evaluator: Evaluator, fuel: int = DEFAULT_FUEL,
                 rec: Optional[tuple[str, int]] = None, tracer: Optional[Tracer] = None,
                 supply: Optional[FreshSupply] = None, naive: bool = False,
                 universe: Sequence[Type] = ()):
        self.ctx = ctx
        self.components = list(components)  # (name, "var" | "ctor") in context order
        self.ev = evaluator
        self.fuel = fuel
        self.rec = rec  # (binding name, index of the decreasing argument)
        self.tracer = tracer
        self.supply = supply or FreshSupply()
        self.stats = Stats()
        self.naive = naive
        self.universe = list(universe)
        self._memo: dict = {}  # naive mode only
        self._instances: dict = {}
        self._index: dict = {}
        self.global_names = set(ctx.vars) | {n for n, _ in components}

    def _trace(self, rule, text, **data):
        if self.tracer is not None:
            self.tracer(rule, text, **data)

    # -- generation --------------------------------------------------------
    def generate(self, st: GenState, scope: Scope, goal: Type) -> Iterator[tuple[Expr, GenState]]:
        """Terms of type ``goal`` using at most ``st.app_depth`` applications.

        Yields each term with the state after it; the remaining budget in
        that state is what the term did not use."""
        if self.naive:
            yield from self._naive(st, scope, goal)
            return
        c = st.constraints
        solved = c.solve(goal)
        if solved != goal and self.tracer is not None:
            self._trace("gen-unify", f"{show_type(goal)} ~> {show_type(solved)}")
        goal = solved
        # gen-var: locals, then globals, then constructors
        for name, kind, scheme in self._heads(scope):
            self.stats.heads_examined += 1
            body, bundled, _ = instantiate(scheme, self.supply)
            added = list(bundled) + [Equality(goal, body)]
            c2 = c.add_wanted(added)
            if not c2.consistent:
                continue
            if self.tracer is not None:
                self._trace("gen-var", f"{name} : {show_type(goal)} ~ {show_type(body)}",
                            added=tuple(added), before=c, after=c2)
            head = Var(name) if kind != "ctor" else Ctor(name)
            yield head, GenState(c2, self.supply, st.app_depth)
        # gen-app: the function first, then its argument
        if st.app_depth > 0:
            alpha = self.supply.uvar()
            fn_goal = Arrow(alpha, goal)
            if self.tracer is not None:
                self._trace("gen-app", f"{show_type(fn_goal)} then {show_type(alpha)}")
            inner = GenState(c, self.supply, st.app_depth - 1)
            for f, st1 in self.generate(inner, scope, fn_goal):
                for a, st2 in self.generate(st1, scope, alpha):
                    yield App(f, a), st2

    def _heads(self, scope: Scope):
        for name, t in scope.locals:
            yield name, "local", Scheme.mono(t)
        local_names = scope.names()
        for name, kind in self.components:
            if name in local_names:
                continue
            if kind == "ctor":
                yield name, kind, self.ctx.ctor(name).scheme()
            else:
                yield name, kind, self.ctx.vars[name]

    def _naive(self, st: GenState, scope: Scope, goal: Type):
        """Baseline: every ground instantiation of every head, with argument
        types drawn from a fixed universe. Terms are built bottom-up by
        exact application count and memoized per type."""
        c = st.constraints
        goal = c.solve(goal)
        for k in range(st.app_depth + 1):
            for e in self._naive_exact(c, scope, goal, k):
                yield e, st

    def _naive_exact(self, c: ConstraintSet, scope: Scope, goal: Type, k: int) -> list:
        key = (scope.locals, c, goal, k)
        if key in self._memo:
            return self._memo[key]
        out: list[Expr] = []
        if k == 0:
            index, choices = self._naive_index(c, scope)
            # every pre-enumerated instance is a head choice at this goal;
            # the hashed lookup only makes rejecting them cheap
            self.stats.heads_examined += choices
            out.extend(index.get(goal, ()))
        else:
            for alpha in self.universe:
                for k1 in range(k):
                    fns = self._naive_exact(c, scope, Arrow(alpha, goal), k1)
                    if not fns:
                        continue
                    args = self._naive_exact(c, scope, alpha, k - 1 - k1)
                    out.extend(App(f, a) for f in fns for a in args)
        self._memo[key] = out
        return out

    def _naive_index(self, c: ConstraintSet, scope: Scope) -> tuple[dict, int]:
        """Heads by the ground type they can take, plus the number of ground
        instances scanned to build the table (once per scope)."""
        key = (scope.locals, c)
        cached = self._index.get(key)
        if cached is not None:
            return cached
        index: dict = {}
        choices = 0
        for name, kind, scheme in self._heads(scope):
            head = Var(name) if kind != "ctor" else Ctor(name)
            for body, bundled in self._ground_instances(scheme):
                choices += 1
                if any(c.solve(e.lhs) != c.solve(e.rhs) for e in bundled):
                    continue
                bucket = index.setdefault(c.solve(body), [])
                if head not in bucket:
                    bucket.append(head)
        self._index[key] = (index, choices)
        return index, choices

    def _ground_instances(self, scheme: Scheme):
        cached = self._instances.get(scheme)
        if cached is None:
            cached = self._instances[scheme] = list(self._instantiate_all(scheme))
        return cached

    def _instantiate_all(self, scheme: Scheme):
        if not scheme.quantified:
            yield scheme.body, list(scheme.constraints)
            return
        for combo in product(self.universe, repeat=len(scheme.quantified)):
            theta = dict(zip(scheme.quantified, combo))
            yield (rename_rigid(scheme.body, theta),
                   [Equality(rename_rigid(e.lhs, theta), rename_rigid(e.rhs, theta))
                    for e in scheme.constraints])

    # -- refinement ----------------------------------------------------------
    def refine(self, c: ConstraintSet, scope: Scope, goal: Type, worlds: Sequence[World],
               cases: int, apps: int, params: Sequence[str] = ()) -> list[Expr]:
        solved = c.solve(goal)
        if solved != goal:
            self._trace("refine-gadt-unify", f"{show_type(goal)} ~> {show_type(solved)}")
        goal = solved
        out: list[Expr] = []
        if isinstance(goal, Arrow):
            if all(isinstance(w.goal, IOEx) for w in worlds):
                out.extend(self._refine_lam(c, scope, goal, worlds, cases, apps, params))
                return out
            out.extend(self._guess(c, scope, goal, worlds, apps))
            return out
        out.extend(self._refine_data(c, scope, goal, worlds, cases, apps))
        if cases > 0:
            out.extend(self._refine_case(c, scope, goal, worlds, cases, apps))
        out.extend(self._guess(c, scope, goal, worlds, apps))
        return out

    def _taken(self, scope: Scope) -> set[str]:
        return scope.names() | self.global_names

    def _refine_lam(self, c, scope, goal: Arrow, worlds, cases, apps, params):
        taken = self._taken(scope)
        if params and params[0] not in scope.names():
            x = params[0]
        else:
            x = fresh_binder(goal.dom, taken)
        self._trace("refine-gadt-lam", f"\\{x} : {show_type(goal.dom)}")
        inner_worlds = [World(w.env.extend(x, w.goal.input), w.goal.output) for w in worlds]
        inner = scope.bind([(x, goal.dom)])
        if self.rec is not None and scope.rec_param is None and self._param_index(scope) == self.rec[1]:
            inner = Scope(inner.locals, inner.scrutinized, inner.decreasing, x)
        return [Lam(x, b) for b in self.refine(c, inner, goal.cod, inner_worlds, cases, apps, params[1:])]

    def _param_index(self, scope: Scope) -> int:
        return len(scope.locals)

    def _refine_data(self, c, scope, goal, worlds, cases, apps):
        if not worlds or not isinstance(goal, TCon):
            return []
        heads = {w.goal.name if isinstance(w.goal, CtorEx) else None for w in worlds}
        if len(heads) != 1 or None in heads:
            return []
        k = heads.pop()
        if not self.ctx.has_ctor(k):
            return []
        sig = self.ctx.ctor(k)
        if sig.result_head != goal.head:
            return []
        theta = dict(zip(sig.quantified, goal.args))
        bundled = [Equality(rename_rigid(e.lhs, theta), rename_rigid(e.rhs, theta)) for e in sig.bundled]
        if bundled and not entails(c, bundled):
            return []
        self._trace("refine-gadt-data", f"{k} at {show_type(goal)}")
        subs = []
        for i, at in enumerate(sig.arg_types):
            sub_worlds = [World(w.env, w.goal.args[i]) for w in worlds]
            options = self.refine(c, scope, rename_rigid(at, theta), sub_worlds, cases, apps)
            if not options:
                return []
            subs.append(options)
        out = []
        for args in product(*subs):
            e: Expr = Ctor(k)
            for a in args:
                e = App(e, a)
            out.append(e)
        return out

    def _refine_case(self, c, scope, goal, worlds, cases, apps):
        out = []
        for x, t in scope.locals:
            if x in scope.scrutinized:
                continue
            t = c.solve(t)
            if not self.ctx.is_scrutinizable(t):
                continue
            ctors = self.ctx.datatype_ctors(t.head)
            split = []
            for k in ctors:
                sub = self.ev.filter_worlds(worlds, k, Var(x), self.fuel)
                if sub is None:
                    split = None
                    break
                split.append(sub)
            if split is None:
                continue
            self._trace("refine-gadt-case", f"case {x} : {show_type(t)}")
            branch_options = []
            for k, sub in zip(ctors, split):
                opts = self.refine_match(c, scope, x, t.args, k, goal, sub, cases, apps)
                if not opts:
                    branch_options = None
                    break
                branch_options.append(opts)
            if branch_options is None:
                continue
            for branches in product(*branch_options):
                out.append(Case(Var(x), tuple(branches)))
        return out

    def refine_match(self, c: ConstraintSet, scope: Scope, x: str, ty_args, k: str, goal: Type,
                     worlds: Sequence[World], cases: int, apps: int) -> list[MatchBranch]:
        sig = self.ctx.ctor(k)
        theta = dict(zip(sig.quantified, ty_args))
        local = [Equality(rename_rigid(e.lhs, theta), rename_rigid(e.rhs, theta)) for e in sig.bundled]
        cb = c.add_given(local) if local else c
        taken = self._taken(scope)
        binders = []
        for at in sig.arg_types:
            name = fresh_binder(rename_rigid(at, theta), taken)
            taken.add(name)
            binders.append(name)
        arg_types = [rename_rigid(at, theta) for at in sig.arg_types]
        if local:
            self._trace("refine-gadt-match", f"{k}: given " + ", ".join(show_equality(e) for e in local),
                        given=tuple(local), ctor=k, consistent=cb.consistent)
        else:
            self._trace("refine-gadt-match", f"{k}", given=(), ctor=k, consistent=True)
        if not cb.consistent:
            body = self._unreachable_body(scope, binders)
            self._trace("refine-gadt-match", f"{k} is unreachable; body {show_inline(body)}")
            return [MatchBranch(k, tuple(binders), body)]
        inner_worlds = []
        for w in worlds:
            v = w.env.lookup(x)
            inner_worlds.append(World(w.env.extend_many(zip(binders, v.args)), w.goal))
        inner = scope.bind(zip(binders, arg_types))
        decreasing = inner.decreasing
        if x == scope.rec_param or x in scope.decreasing:
            decreasing = decreasing | set(binders)
        inner = Scope(inner.locals, inner.scrutinized | {x}, frozenset(decreasing), inner.rec_param)
        bodies = self.refine(cb, inner, goal, inner_worlds, cases - 1, apps)
        return [MatchBranch(k, tuple(binders), b) for b in bodies]

    def _unreachable_body(self, scope: Scope, binders) -> Expr:
        if binders:
            return Var(binders[0])
        if scope.locals:
            return Var(sorted(n for n, _ in scope.locals)[0])
        return Ctor(sorted(self.ctx.ctors)[0])

    def _guess(self, c, scope, goal, worlds, apps):
        out = []
        st = GenState(c, self.supply, apps)
        for e, _ in self.generate(st, scope, goal):
            if not self._recursion_ok(e, scope):
                continue
            verdict = combine(self.ev.satisfies(w.env, e, w.goal, self.fuel) for w in worlds)
            if verdict == CONTRADICTED:
                continue
            self._trace("refine-gadt-guess", f"{show_inline(e)} ({verdict})")
            out.append(e)
        return out

    def _recursion_ok(self, e: Expr, scope: Scope) -> bool:
        if self.rec is None:
            return True
        name, idx = self.rec

        def ok(e) -> bool:
            head, args = spine(e)
            if isinstance(head, Var) and head.name == name and name not in scope.names():
                if len(args) <= idx:
                    return False
                arg = args[idx]
                if not (isinstance(arg, Var) and arg.name in scope.decreasing):
                    return False
            return all(ok(a) for a in args)

        return ok(e)


# ---------------------------------------------------------------------------
# Driver

def _levels(budget: SearchBudget):
    pairs = [(c, a) for c in range(budget.max_case_depth + 1) for a in range(budget.max_app_depth + 1)]
    # case splits are the expensive dimension: exhaust applications first
    return sorted(pairs)


def components_for(ctx: Context, name: str, scheme: Scheme, opts_ctx, rec: bool,
                   exclude: Sequence[str] = ()) -> list[tuple[str, str]]:
    """Generation components in context order."""
    out = []
    allowed = set(opts_ctx) if opts_ctx is not None else None
    for v in ctx.vars:
        if v == name or v in exclude:
            continue
        if allowed is None or v in allowed:
            out.append((v, "var"))
    if rec:
        out.append((name, "var"))
    for k in ctx.ctors:
        if allowed is None or k in allowed:
            out.append((k, "ctor"))
    return out


def strip_params(e: Expr, params: Sequence[str]) -> Expr:
    for p in params:
        if isinstance(e, Lam) and e.binder == p:
            e = e.body
        else:
            break
    return e


def final_verdict(ev: Evaluator, env, cand: Expr, rows, rec_name: Optional[str],
                  arity: int, fuel: int) -> tuple[str, tuple]:
    """Run the finished program on each top-level row. Recursive calls are
    answered from the examples when possible and by the program itself
    otherwise."""
    if not rows:
        return UNKNOWN, ()
    fn = None
    if rec_name is not None:
        fn = ExampleFn(rec_name, arity, _table(rows))
        env = env.extend(rec_name, fn)
    r = ev.run(env, cand, fuel)
    if not isinstance(r, Val):
        return UNKNOWN, tuple(UNKNOWN for _ in rows)
    if fn is not None:
        fn.fallback = r.value
    per_row = tuple(ev.value_satisfies(r.value, row, fuel) for row in rows)
    verdict = combine(per_row)
    return (OK if verdict == SATISFIED else verdict), per_row


def _table(rows):
    from .evaluate import example_table
    return example_table(rows)[1]


def synthesize_binding(program, goal, budget: SearchBudget | None = None, fuel: int = DEFAULT_FUEL,
                       tracer: Optional[Tracer] = None, eval_trace=None, naive: bool = False,
                       stats_out: Optional[dict] = None) -> list[Candidate]:
    """Ranked candidates for one goal of a loaded program."""
    ctx: Context = program.ctx
    scheme: Scheme = goal.scheme
    opts = goal.options
    if budget is None:
        budget = SearchBudget()
    if opts.depth is not None or opts.max_candidates is not None:
        budget = SearchBudget(opts.depth if opts.depth is not None else budget.max_app_depth,
                              budget.max_case_depth,
                              opts.max_candidates if opts.max_candidates is not None else budget.max_candidates)
    rows = goal.examples.rows if goal.examples is not None else ()
    consts = goal.examples.constants if goal.examples is not None else ()
    arity = len(split_arrows(scheme.body)[0])

    other_goals = [g.name for g in program.goals if g.name != goal.name]
    rec = opts.rec_arg is not None
    comps = components_for(ctx, goal.name, scheme, opts.ctx, rec, other_goals)
    gctx = ctx.with_poly_consts(consts)
    ev = Evaluator({n: s.arity for n, s in ctx.ctors.items()}, trace=eval_trace)

    universe = naive_universe(ctx, scheme) if naive else ()
    engine = Synthesizer(gctx, comps, ev, fuel, (goal.name, opts.rec_arg) if rec else None,
                         tracer, FreshSupply(), naive, universe)
    env0 = program.env
    if rec:
        env0 = env0.extend(goal.name, ExampleFn(goal.name, arity, _table(rows) if rows else {}))
    worlds = [World(env0, row) for row in rows]

    found: dict[str, Expr] = {}
    for cases, apps in _levels(budget):
        exprs = engine.refine(EMPTY, Scope(), scheme.body, worlds, cases, apps, goal.params)
        fresh = 0
        for e in exprs:
            key = alpha_key(e)
            if key not in found:
                found[key] = e
                fresh += 1
        engine.stats.levels.append((cases, apps, fresh))
        judged = _judge(found, ev, program.env, rows, goal, arity, fuel, rec)
        if any(c.verdict == OK for c in judged) or len(judged) >= budget.max_candidates:
            break
    result = judged[: budget.max_candidates]
    engine.stats.candidates_emitted = len(result)
    if stats_out is not None:
        stats_out["heads_examined"] = engine.stats.heads_examined
        stats_out["candidates_emitted"] = len(result)
        stats_out["levels"] = list(engine.stats.levels)
    return result


def _judge(found, ev, env, rows, goal, arity, fuel, rec) -> list[Candidate]:
    out = []
    for e in found.values():
        verdict, per_row = final_verdict(ev, env, e, rows, goal.name if rec else None, arity, fuel)
        if verdict == CONTRADICTED:
            continue
        body = strip_params(e, goal.params)
        out.append(Candidate(e, body, verdict, per_row))
    out.sort(key=lambda c: (c.verdict != OK, c.size, show_inline(c.body)))
    return out


def naive_universe(ctx: Context, scheme: Scheme) -> list[Type]:
    """Ground types the baseline instantiates with: the goal's type
    variables and nullary datatypes, those under one datatype, and arrows
    between the former."""
    atoms: list[Type] = [TVar(a) for a in scheme.quantified]
    for name, d in ctx.datatypes.items():
        if not d.params:
            atoms.append(TCon(name))
    out = list(atoms)
    for name, d in ctx.datatypes.items():
        if d.params:
            for args in product(atoms, repeat=len(d.params)):
                out.append(TCon(name, tuple(args)))
    for a in atoms:
        for b in atoms:
            out.append(Arrow(a, b))
    return out
