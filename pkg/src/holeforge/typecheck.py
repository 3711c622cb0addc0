"""Type inference, GADT-aware checking, and example typing.

``infer_expr`` is the constraint-generating inferencer for the plain
Hindley-Milner fragment: it returns a type and the equalities that must
hold, without solving them. ``check_expr`` is an algorithmic checker that
understands bundled constructor equalities: matching on ``Plus`` at
``Exp a`` makes ``a ~ Int`` a given inside that branch. It is the oracle
the synthesizer's output is held to.
"""
from __future__ import annotations

from typing import Callable, Optional

from .constraints import EMPTY, ConstraintSet, Inconsistent, instantiate, unify
from .diagnostics import Diagnostic
from .syntax import (
    App, Arrow, Case, Closure, ConstEx, Context, Ctor, CtorEx, CtorV, Equality,
    Expr, FreshSupply, Hole, IOEx, Lam, PolyConst, PolyConstV, Scheme, TCon,
    TopExample, TVar, Type, UVar, Var, free_uvars, rename_rigid, type_vars,
)

Trace = Optional[Callable[[str], None]]


class TypeError_(Diagnostic):
    def __init__(self, message: str, code: str = "E008"):
        super().__init__(message, code)


# ---------------------------------------------------------------------------
# Inference

def infer_expr(ctx: Context, e: Expr, supply: FreshSupply, holes: dict | None = None,
               trace: Trace = None) -> tuple[Type, ConstraintSet]:
    """Type of ``e`` and the (unsolved) constraints it generates."""
    eqs: list[Equality] = []
    t = _infer(ctx, e, supply, eqs, holes, trace)
    return t, ConstraintSet(eqs)


def _lookup_scheme(ctx: Context, e) -> Scheme:
    match e:
        case Var(n):
            if n not in ctx.vars:
                raise TypeError_(f"unbound variable {n}", "E014")
            return ctx.vars[n]
        case Ctor(n):
            if not ctx.has_ctor(n):
                raise TypeError_(f"unknown constructor {n}", "E011")
            return ctx.ctor(n).scheme()
    raise TypeError(e)


def _infer(ctx, e, supply, eqs, holes, trace) -> Type:
    match e:
        case Var() | Ctor():
            body, bundled, _ = instantiate(_lookup_scheme(ctx, e), supply)
            eqs.extend(bundled)
            t = body
        case PolyConst(n):
            if n not in ctx.poly_consts:
                raise TypeError_(f"unknown polymorphic constant {n}", "E014")
            t = TVar(ctx.poly_consts[n])
        case Lam(x, body):
            a = supply.uvar()
            t = Arrow(a, _infer(ctx.with_var(x, Scheme.mono(a)), body, supply, eqs, holes, trace))
        case App(f, arg):
            tf = _infer(ctx, f, supply, eqs, holes, trace)
            ta = _infer(ctx, arg, supply, eqs, holes, trace)
            t = supply.uvar()
            eqs.append(Equality(tf, Arrow(ta, t)))
        case Case(s, branches):
            ts = _infer(ctx, s, supply, eqs, holes, trace)
            if not branches:
                raise TypeError_("case with no alternatives", "E013")
            head = _branch_datatype(ctx, branches)
            params = [supply.uvar() for _ in ctx.datatypes[head].params]
            eqs.append(Equality(ts, TCon(head, tuple(params))))
            t = supply.uvar()
            for b in branches:
                sig = ctx.ctor(b.ctor)
                if sig.result_head != head:
                    raise TypeError_(f"constructor {b.ctor} does not belong to {head}")
                if len(b.binders) != sig.arity:
                    raise TypeError_(f"{b.ctor} binds {sig.arity} variable(s), not {len(b.binders)}", "E005")
                theta = {q: p for q, p in zip(sig.quantified, params)}
                inner = ctx.with_vars((x, Scheme.mono(rename_rigid(at, theta)))
                                      for x, at in zip(b.binders, sig.arg_types))
                tb = _infer(inner, b.body, supply, eqs, holes, trace)
                eqs.append(Equality(t, tb))
            _check_coverage(ctx, head, [b.ctor for b in branches])
        case Hole(i):
            t = supply.uvar()
            if holes is not None:
                holes[i] = t
        case _:
            raise TypeError(f"not an expression: {e!r}")
    if trace is not None:
        from .pretty import show_inline, show_type
        trace(f"{show_inline(e)} : {show_type(t)}  [{len(eqs)} constraint(s)]")
    return t


def _check_coverage(ctx: Context, head: str, names) -> None:
    decl = ctx.datatypes[head]
    if decl.opaque:
        raise TypeError_(f"cannot match on values of the opaque type {head}", "E013")
    missing = [k for k in decl.ctors if k not in names]
    if missing:
        raise TypeError_(f"non-exhaustive case over {head}: missing {', '.join(missing)}", "E013")
    if len(set(names)) != len(names):
        raise TypeError_(f"case over {head} matches a constructor twice", "E013")


def _branch_datatype(ctx: Context, branches) -> str:
    first = branches[0].ctor
    if not ctx.has_ctor(first):
        raise TypeError_(f"unknown constructor {first}", "E011")
    return ctx.ctor(first).result_head


def generalize(t: Type, taken: set[str] = frozenset()) -> Scheme:
    """Turn the unification variables of ``t`` into quantified variables."""
    names: dict = {}
    pool = (chr(c) for c in range(ord("a"), ord("z") + 1))
    extra = 0
    for v in type_vars(t):
        if isinstance(v, UVar) and v not in names:
            while True:
                try:
                    n = next(pool)
                except StopIteration:
                    extra += 1
                    n = f"t{extra}"
                if n not in taken:
                    break
            names[v] = n

    def go(t):
        match t:
            case UVar():
                return TVar(names[t])
            case TCon(h, args):
                return TCon(h, tuple(go(a) for a in args))
            case Arrow(d, c):
                return Arrow(go(d), go(c))
        return t

    return Scheme(tuple(names.values()), (), go(t))


def infer_binding(ctx: Context, name: str, body: Expr, supply: FreshSupply,
                  trace: Trace = None) -> Scheme:
    """Infer and generalize the type of a (possibly self-recursive) binding."""
    self_t = supply.uvar()
    t, c = infer_expr(ctx.with_var(name, Scheme.mono(self_t)), body, supply, trace=trace)
    c = c.add_wanted([Equality(self_t, t)])
    if not c.consistent:
        raise TypeError_(str(c.error))
    solved = c.solve(t)
    taken = {v.name for v in type_vars(solved) if isinstance(v, TVar)}
    return generalize(solved, taken)


# ---------------------------------------------------------------------------
# Checking

class _Checker:
    def __init__(self, ctx: Context, supply: FreshSupply, trace: Trace = None):
        self.ctx = ctx
        self.supply = supply
        self.trace = trace

    def _log(self, e, t, c):
        if self.trace is not None:
            from .pretty import show_constraints, show_inline, show_type
            self.trace(f"{show_inline(e)} <= {show_type(t)}  {show_constraints(c)}")

    def check(self, c: ConstraintSet, ctx: Context, e: Expr, t: Type) -> Optional[ConstraintSet]:
        self._log(e, t, c)
        match e:
            case Lam(x, body):
                goal = c.solve(t)
                if isinstance(goal, UVar):
                    d, r = self.supply.uvar(), self.supply.uvar()
                    c = c.add_wanted([Equality(goal, Arrow(d, r))])
                    if not c.consistent:
                        return None
                    goal = Arrow(d, r)
                if not isinstance(goal, Arrow):
                    return None
                return self.check(c, ctx.with_var(x, Scheme.mono(goal.dom)), body, goal.cod)
            case Case(s, branches):
                return self.check_case(c, ctx, s, branches, t)
        got = self.synth(c, ctx, e)
        if got is None:
            return None
        c2, te = got
        c2 = c2.add_wanted([Equality(te, t)])
        return c2 if c2.consistent else None

    def check_case(self, c, ctx, s, branches, t):
        got = self.synth(c, ctx, s)
        if got is None:
            return None
        c, ts = got
        ts = c.solve(ts)
        if not isinstance(ts, TCon) or ts.head not in ctx.datatypes:
            return None
        decl = ctx.datatypes[ts.head]
        names = [b.ctor for b in branches]
        if sorted(names) != sorted(decl.ctors) or decl.opaque:
            return None
        for b in branches:
            sig = ctx.ctor(b.ctor)
            if len(b.binders) != sig.arity:
                return None
            theta = {q: a for q, a in zip(sig.quantified, ts.args)}
            local = [Equality(rename_rigid(eq.lhs, theta), rename_rigid(eq.rhs, theta))
                     for eq in sig.bundled]
            inner = ctx.with_vars((x, Scheme.mono(rename_rigid(at, theta)))
                                  for x, at in zip(b.binders, sig.arg_types))
            if local:
                cb = c.add_given(local)
                if not cb.consistent:
                    continue  # unreachable branch: anything goes
                if self.check(cb, inner, b.body, t) is None:
                    return None
            else:
                out = self.check(c, inner, b.body, t)
                if out is None:
                    return None
                c = out
        return c

    def synth(self, c: ConstraintSet, ctx: Context, e: Expr):
        match e:
            case Var(n):
                if n not in ctx.vars:
                    return None
                body, bundled, _ = instantiate(ctx.vars[n], self.supply)
                c = c.add_wanted(bundled)
                return (c, body) if c.consistent else None
            case Ctor(n):
                if not ctx.has_ctor(n):
                    return None
                body, bundled, _ = instantiate(ctx.ctor(n).scheme(), self.supply)
                c = c.add_wanted(bundled)
                return (c, body) if c.consistent else None
            case PolyConst(n):
                if n not in ctx.poly_consts:
                    return None
                return c, TVar(ctx.poly_consts[n])
            case App(f, a):
                got = self.synth(c, ctx, f)
                if got is None:
                    return None
                c, tf = got
                tf = c.solve(tf)
                if isinstance(tf, UVar):
                    d, r = self.supply.uvar(), self.supply.uvar()
                    c = c.add_wanted([Equality(tf, Arrow(d, r))])
                    if not c.consistent:
                        return None
                    tf = Arrow(d, r)
                if not isinstance(tf, Arrow):
                    return None
                c = self.check(c, ctx, a, tf.dom)
                if c is None:
                    return None
                return c, tf.cod
            case Lam() | Case():
                t = self.supply.uvar()
                out = self.check(c, ctx, e, t)
                return None if out is None else (out, t)
        return None


def _supply_above(c: ConstraintSet, ctx: Context, *types: Type) -> FreshSupply:
    top = 0
    ids = free_uvars(c)
    for t in types:
        ids |= free_uvars(t)
    for s in ctx.vars.values():
        ids |= free_uvars(s.body)
    if ids:
        top = max(ids)
    return FreshSupply(top + 1)


def check_expr_constraints(c: ConstraintSet, ctx: Context, e: Expr, t: Type,
                           supply: FreshSupply | None = None,
                           trace: Trace = None) -> Optional[ConstraintSet]:
    """Final constraint set of a successful check, else None."""
    assert c.consistent, "checking under inconsistent constraints"
    if supply is None:
        supply = _supply_above(c, ctx, t)
    return _Checker(ctx, supply, trace).check(c, ctx, e, t)


def check_expr(c: ConstraintSet, ctx: Context, e: Expr, t: Type,
               supply: FreshSupply | None = None, trace: Trace = None) -> bool:
    return check_expr_constraints(c, ctx, e, t, supply, trace) is not None


def explain_mismatch(ctx: Context, e: Expr, s: Scheme) -> Optional[str]:
    """Why ``e`` fails against ``s``: the first clash found by inference,
    or None when inference alone finds nothing wrong. Scope and shape
    errors propagate as ``TypeError_`` with their own codes."""
    supply = _supply_above(EMPTY, ctx, s.body)
    t, c = infer_expr(ctx, e, supply)
    full = c.add_wanted([Equality(t, s.body)])
    return str(full.error) if not full.consistent else None


def check_scheme(ctx: Context, e: Expr, s: Scheme, trace: Trace = None) -> bool:
    """Check ``e`` against a declared scheme, its variables held rigid."""
    return check_expr(ConstraintSet.given(s.constraints), ctx, e, s.body, trace=trace)


# ---------------------------------------------------------------------------
# Examples

def check_value(ctx: Context, v, t: Type) -> bool:
    match v:
        case PolyConstV(n):
            return n in ctx.poly_consts and t == TVar(ctx.poly_consts[n])
        case CtorV(n, args):
            return _check_ctor_form(ctx, n, args, t, check_value)
        case Closure(x, body, _):
            return check_expr(EMPTY, ctx, Lam(x, body), t)
    return False


def check_example(ctx: Context, x, t: Type) -> bool:
    match x:
        case ConstEx(n):
            return n in ctx.poly_consts and t == TVar(ctx.poly_consts[n])
        case CtorEx(n, args):
            return _check_ctor_form(ctx, n, args, t, check_example)
        case IOEx(v, out):
            return isinstance(t, Arrow) and check_value(ctx, v, t.dom) and check_example(ctx, out, t.cod)
    return False


def _check_ctor_form(ctx, name, args, t, check_arg) -> bool:
    if not ctx.has_ctor(name) or not isinstance(t, TCon):
        return False
    sig = ctx.ctor(name)
    if sig.result_head != t.head or len(sig.quantified) != len(t.args) or len(args) != sig.arity:
        return False
    # the result is exactly T q1..qn, so matching is positional
    theta = {q: a for q, a in zip(sig.quantified, t.args)}
    bundled = [Equality(rename_rigid(e.lhs, theta), rename_rigid(e.rhs, theta)) for e in sig.bundled]
    if not ConstraintSet(bundled).consistent:
        return False
    return all(check_arg(ctx, a, rename_rigid(at, theta)) for a, at in zip(args, sig.arg_types))


def check_top_example(ctx: Context, x: TopExample, s: Scheme) -> bool:
    if s.constraints:
        return False
    for c, a in x.constants:
        if a not in s.quantified:
            return False
    inner = ctx.with_poly_consts(x.constants)
    return all(check_example(inner, row, s.body) for row in x.rows)


def unify_or_raise(eqs) -> None:
    try:
        unify(eqs)
    except Inconsistent as exc:
        raise TypeError_(str(exc)) from None
