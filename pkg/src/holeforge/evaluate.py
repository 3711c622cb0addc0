"""Call-by-value evaluation with fuel, example checking and world filtering.

The function being synthesized is bound to an ``ExampleFn``: a partial
function read off the top-level example rows. Applying it outside its
table makes evaluation stuck, which example checking reports as
``unknown`` rather than as a failure.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .syntax import (
    App, Case, Closure, ConstEx, Ctor, CtorEx, CtorV, Example, Expr, Hole,
    IOEx, Lam, PolyConst, PolyConstV, UnboundName, Value, ValueEnv, Var,
    World, example_to_value, is_literal, spine,
)

DEFAULT_FUEL = 10_000

SATISFIED = "satisfied"
CONTRADICTED = "contradicted"
UNKNOWN = "unknown"

UNKNOWN_CALL = "unknown-recursive-call"
UNMATCHED = "unmatched-case"
UNBOUND = "unbound"


@dataclass(frozen=True)
class Val:
    value: Value


@dataclass(frozen=True)
class Stuck:
    reason: str
    detail: str = ""


@dataclass(frozen=True)
class OutOfFuel:
    pass


Outcome = Val | Stuck | OutOfFuel


class ExampleFn:
    """Runtime value of the recursive binding.

    ``table`` maps full argument tuples to example outputs. ``fallback``,
    when set, is the candidate's own closure; it is consulted on table
    misses so a finished program can be run against its examples.
    """

    __slots__ = ("name", "arity", "table", "fallback", "args")

    def __init__(self, name: str, arity: int, table: dict, fallback=None, args: tuple = ()):
        self.name = name
        self.arity = arity
        self.table = table
        self.fallback = fallback
        self.args = args

    def with_arg(self, v: Value) -> "ExampleFn":
        return ExampleFn(self.name, self.arity, self.table, self.fallback, self.args + (v,))

    def __repr__(self):
        return f"<{self.name}/{self.arity} applied to {len(self.args)}>"


def example_table(rows: Iterable[Example]) -> tuple[int, dict]:
    """Arity and lookup table of a set of top-level rows."""
    table: dict = {}
    arity = None
    for row in rows:
        inputs = []
        x = row
        while isinstance(x, IOEx):
            inputs.append(x.input)
            x = x.output
        if arity is None:
            arity = len(inputs)
        elif arity != len(inputs):
            raise ValueError("example rows disagree on the number of arguments")
        table.setdefault(tuple(inputs), x)
    return arity or 0, table


class _Stop(Exception):
    def __init__(self, outcome):
        self.outcome = outcome


class _Fuel:
    __slots__ = ("left",)

    def __init__(self, n: int):
        self.left = n

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise _Stop(OutOfFuel())


def _eta(name: str, arity: int) -> Closure:
    binders = [f"#{i}" for i in range(arity)]
    body: Expr = Ctor(name)
    for b in binders:
        body = App(body, Var(b))
    for b in reversed(binders[1:]):
        body = Lam(b, body)
    return Closure(binders[0], body, ValueEnv())


class Evaluator:
    """Big-step CBV evaluator. ``arities`` gives each constructor's
    argument count; ``trace`` receives one line per beta step."""

    def __init__(self, arities: dict, trace: Optional[Callable[[str], None]] = None):
        self.arities = arities
        self.trace = trace

    def arity(self, name: str) -> int:
        if is_literal(name):
            return 0
        return self.arities[name]

    # -- entry points ----------------------------------------------------
    def run(self, env: ValueEnv, e: Expr, fuel: int = DEFAULT_FUEL) -> Outcome:
        return self._guard(lambda f: self._eval(env, e, f), fuel)

    def apply_value(self, fn: Value, args: Sequence[Value], fuel: int = DEFAULT_FUEL) -> Outcome:
        def go(f):
            v = fn
            for a in args:
                v = self._apply(v, a, f)
            return v
        return self._guard(go, fuel)

    def _guard(self, thunk, fuel: int) -> Outcome:
        f = _Fuel(fuel)
        try:
            return Val(thunk(f))
        except _Stop as stop:
            return stop.outcome
        except RecursionError:
            return OutOfFuel()

    # -- core ------------------------------------------------------------
    def _eval(self, env: ValueEnv, e: Expr, fuel: _Fuel):
        match e:
            case Var(n):
                try:
                    return env.lookup(n)
                except UnboundName:
                    raise _Stop(Stuck(UNBOUND, n)) from None
            case PolyConst(n):
                return PolyConstV(n)
            case Ctor(n):
                k = self.arity(n)
                return CtorV(n) if k == 0 else _eta(n, k)
            case Lam(x, body):
                return Closure(x, body, env)
            case App():
                head, args = spine(e)
                if isinstance(head, Ctor):
                    k = self.arity(head.name)
                    if len(args) >= k:
                        vals = [self._eval(env, a, fuel) for a in args]
                        v = CtorV(head.name, tuple(vals[:k]))
                        for extra in vals[k:]:
                            v = self._apply(v, extra, fuel)
                        return v
                fn = self._eval(env, e.fn, fuel)
                arg = self._eval(env, e.arg, fuel)
                return self._apply(fn, arg, fuel)
            case Case(s, branches):
                v = self._eval(env, s, fuel)
                if isinstance(v, CtorV):
                    for b in branches:
                        if b.ctor == v.name and len(b.binders) == len(v.args):
                            return self._eval(env.extend_many(zip(b.binders, v.args)), b.body, fuel)
                raise _Stop(Stuck(UNMATCHED, repr(v)))
            case Hole(i):
                raise _Stop(Stuck(UNBOUND, f"_{i}"))
        raise TypeError(f"cannot evaluate {e!r}")

    def _apply(self, fn, arg, fuel: _Fuel):
        match fn:
            case Closure(x, body, captured):
                fuel.tick()
                if self.trace is not None:
                    from .pretty import show_inline, show_value
                    self.trace(f"beta: (\\{x} -> {show_inline(body)}) {show_value(arg)}")
                return self._eval(captured.extend(x, arg), body, fuel)
            case ExampleFn():
                g = fn.with_arg(arg)
                if len(g.args) < g.arity:
                    return g
                fuel.tick()
                out = g.table.get(g.args)
                if out is not None:
                    if self.trace is not None:
                        self.trace(f"call: {g.name} answered from examples")
                    try:
                        return example_to_value(out)
                    except ValueError:
                        raise _Stop(Stuck(UNKNOWN_CALL, g.name)) from None
                if g.fallback is None:
                    raise _Stop(Stuck(UNKNOWN_CALL, g.name))
                v = g.fallback
                for a in g.args:
                    v = self._apply(v, a, fuel)
                return v
        # applying a constructor value or constant: the elimination fails
        raise _Stop(Stuck(UNMATCHED, f"apply {fn!r}"))

    # -- examples ----------------------------------------------------------
    def satisfies(self, env: ValueEnv, e: Expr, x: Example, fuel: int = DEFAULT_FUEL) -> str:
        f = _Fuel(fuel)
        try:
            v = self._eval(env, e, f)
            return self._compare(v, x, f)
        except _Stop:
            return UNKNOWN
        except RecursionError:
            return UNKNOWN

    def value_satisfies(self, v: Value, x: Example, fuel: int = DEFAULT_FUEL) -> str:
        f = _Fuel(fuel)
        try:
            return self._compare(v, x, f)
        except (_Stop, RecursionError):
            return UNKNOWN

    def _compare(self, v, x: Example, fuel: _Fuel) -> str:
        match x:
            case ConstEx(n):
                return SATISFIED if v == PolyConstV(n) else CONTRADICTED
            case CtorEx(n, args):
                if not isinstance(v, CtorV) or v.name != n or len(v.args) != len(args):
                    return CONTRADICTED
                return combine(self._compare_sub(a, b, fuel) for a, b in zip(v.args, args))
            case IOEx(inp, out):
                if not isinstance(v, (Closure, ExampleFn)):
                    return CONTRADICTED
                return self._compare(self._apply(v, inp, fuel), out, fuel)
        raise TypeError(f"not an example: {x!r}")

    def _compare_sub(self, v, x, fuel) -> str:
        try:
            return self._compare(v, x, fuel)
        except _Stop as stop:
            if isinstance(stop.outcome, OutOfFuel):
                raise
            return UNKNOWN

    def filter_worlds(self, worlds: Sequence[World], ctor: str, e: Expr,
                      fuel: int = DEFAULT_FUEL) -> Optional[list[World]]:
        out = []
        for w in worlds:
            r = self.run(w.env, e, fuel)
            if not isinstance(r, Val):
                return None
            if isinstance(r.value, CtorV) and r.value.name == ctor:
                out.append(w)
        return out


def combine(verdicts: Iterable[str]) -> str:
    """Contradicted dominates unknown, which dominates satisfied."""
    seen_unknown = False
    for v in verdicts:
        if v == CONTRADICTED:
            return CONTRADICTED
        if v == UNKNOWN:
            seen_unknown = True
    return UNKNOWN if seen_unknown else SATISFIED


def _default_arities() -> dict:
    from .prelude import prelude_context
    return {n: sig.arity for n, sig in prelude_context().ctors.items()}


def eval_expr(env: ValueEnv, e: Expr, fuel: int = DEFAULT_FUEL, arities: dict | None = None) -> Outcome:
    return Evaluator(arities if arities is not None else _default_arities()).run(env, e, fuel)


def example_satisfies(env: ValueEnv, e: Expr, x: Example, fuel: int = DEFAULT_FUEL,
                      arities: dict | None = None) -> str:
    return Evaluator(arities if arities is not None else _default_arities()).satisfies(env, e, x, fuel)


def filter_worlds(worlds: Sequence[World], ctor: str, e: Expr, fuel: int = DEFAULT_FUEL,
                  arities: dict | None = None) -> Optional[list[World]]:
    ev = Evaluator(arities if arities is not None else _default_arities())
    return ev.filter_worlds(worlds, ctor, e, fuel)
