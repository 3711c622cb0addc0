"""Turning a parsed file into a checked program: context, runtime
environment of defined bindings, and synthesis goals."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .diagnostics import Diagnostic
from .parser import DataSrc, Goal, SourceFile, parse_source
from .syntax import (
    Arrow, Closure, Context, CtorSig, DataDecl, Expr, FreshSupply, Lam, Scheme,
    TCon, TVar, Type, ValueEnv, is_literal, type_vars,
)
from .typecheck import TypeError_, check_scheme, check_top_example, explain_mismatch, infer_binding


@dataclass
class Program:
    ctx: Context
    env: ValueEnv
    goals: tuple = ()
    source: Optional[SourceFile] = None
    defined: tuple = ()  # names with executable bodies

    @property
    def arities(self) -> dict:
        return {n: s.arity for n, s in self.ctx.ctors.items()}


def _check_type(ctx: Context, t: Type, where: str, line: int, bound: Iterable[str] | None = None) -> None:
    match t:
        case TCon(h, args):
            if h not in ctx.datatypes:
                raise Diagnostic(f"unknown type {h} in {where}", "E019", line, 1)
            want = len(ctx.datatypes[h].params)
            if want != len(args):
                raise Diagnostic(f"{h} expects {want} type argument(s), got {len(args)} in {where}",
                                 "E005", line, 1)
            for a in args:
                _check_type(ctx, a, where, line, bound)
        case Arrow(d, c):
            _check_type(ctx, d, where, line, bound)
            _check_type(ctx, c, where, line, bound)
        case TVar(n):
            if bound is not None and n not in bound:
                raise Diagnostic(f"type variable {n} is not in scope in {where}", "E007", line, 1)


def well_formed(datatypes: Iterable[DataSrc], base: Context | None = None) -> Context:
    """Extend ``base`` with datatype declarations, checking the context
    invariants. Returns the extended context or raises a Diagnostic naming
    the first violation."""
    base = base or Context()
    dts = dict(base.datatypes)
    ctors = dict(base.ctors)
    decls = list(datatypes)
    for d in decls:
        if d.name in dts:
            raise Diagnostic(f"datatype {d.name} is declared twice", "E006", d.line, 1)
        dts[d.name] = DataDecl(d.name, d.params, tuple(k.name for k in d.ctors), d.opaque)
    ctx = Context(dict(base.vars), ctors, dict(base.poly_consts), dts)
    for d in decls:
        for k in d.ctors:
            if k.name in ctors:
                raise Diagnostic(f"constructor {k.name} is declared twice", "E006", d.line, 1)
            if is_literal(k.name):
                raise Diagnostic(f"{k.name} is reserved for Int literals", "E006", d.line, 1)
            if len(k.quantified) != len(d.params) or k.result_head != d.name:
                raise Diagnostic(f"constructor {k.name} has the wrong result type", "E005", d.line, 1)
            where = f"constructor {k.name}"
            for t in k.arg_types:
                _check_type(ctx, t, where, d.line, k.quantified)
            for eq in k.bundled:
                _check_type(ctx, eq.lhs, where, d.line, k.quantified)
                _check_type(ctx, eq.rhs, where, d.line, k.quantified)
            ctors[k.name] = k
    return ctx


def _lambdas(params, body: Expr) -> Expr:
    for p in reversed(params):
        body = Lam(p, body)
    return body


def load_program(src: SourceFile, prelude: Program | None, path: str = "<input>") -> Program:
    try:
        return _load(src, prelude)
    except Diagnostic as d:
        raise d.at(path) if d.path == "<input>" else d


def _load(src: SourceFile, prelude: Program | None) -> Program:
    base = prelude.ctx if prelude is not None else Context()
    ctx = well_formed(src.datatypes, base)
    goal_names = {g.name for g in src.goals}

    sigs = {}
    for s in src.signatures:
        if s.name in ctx.vars:
            raise Diagnostic(f"{s.name} is already defined by the prelude", "E006", s.line, 1)
        _check_type(ctx, s.scheme.body, f"the signature of {s.name}", s.line, s.scheme.quantified)
        sigs[s.name] = s.scheme
    ctx = ctx.with_vars(sigs.items())

    supply = FreshSupply()
    env_items = dict(prelude.env.items()) if prelude is not None else {}
    env = ValueEnv()
    defined = list(prelude.defined) if prelude is not None else []
    cafs = {}
    for b in src.bindings:
        if b.name in goal_names:
            continue
        body = _lambdas(b.params, b.body)
        if b.name in sigs:
            if not check_scheme(ctx, body, sigs[b.name]):
                try:
                    why = explain_mismatch(ctx, body, sigs[b.name])
                except TypeError_ as err:
                    raise Diagnostic(f"in {b.name}: {err.message}", err.code, b.line, b.col) from None
                msg = f"{b.name} does not have its declared type {_show(sigs[b.name])}"
                raise Diagnostic(f"{msg}: {why}" if why else msg, "E008", b.line, b.col)
        else:
            try:
                scheme = infer_binding(ctx, b.name, body, supply)
            except TypeError_ as err:
                raise Diagnostic(f"in {b.name}: {err.message}", err.code, b.line, b.col) from None
            ctx = ctx.with_var(b.name, scheme)
        if isinstance(body, Lam):
            env_items[b.name] = Closure(body.binder, body.body, env)
        else:
            cafs[b.name] = body  # evaluated once every closure is in place
        defined.append(b.name)

    # tie the recursive knot: every closure sees every defined name
    env._items.update(env_items)
    from .evaluate import Evaluator, Val
    ev = Evaluator({n: s.arity for n, s in ctx.ctors.items()})
    for name, body in cafs.items():
        r = ev.run(env, body)
        if isinstance(r, Val):
            env._items[name] = r.value

    for g in src.goals:
        if g.options.ctx is not None:
            for n in g.options.ctx:
                if n not in ctx.vars and not ctx.has_ctor(n):
                    raise Diagnostic(f"ctx names {n}, which is not in scope", "E014", g.line, 1)
        if g.examples is not None and not check_top_example(ctx, g.examples, g.scheme):
            raise Diagnostic(f"the examples for {g.name} do not have type "
                             f"{_show(g.scheme)}", "E009", g.line, 1)
    return Program(ctx, env, tuple(src.goals), src, tuple(defined))


def _show(s: Scheme) -> str:
    from .pretty import show_scheme
    return show_scheme(s)


def load_text(text: str, path: str = "<input>", prelude: Program | None | bool = True) -> Program:
    """Parse and load ``text``. ``prelude=True`` uses the prelude in effect
    (built-in or HOLEFORGE_PRELUDE); ``None``/``False`` loads without one."""
    if prelude is True:
        prelude = default_prelude()
    elif prelude is False:
        prelude = None
    known = prelude.arities if prelude is not None else {}
    src = parse_source(text, path, known_ctors=known)
    return load_program(src, prelude, path)


def load_prelude(path: str | None = None) -> Program:
    from .prelude import prelude_program, prelude_text
    import os
    from .prelude import ENV_VAR
    if path is None and not os.environ.get(ENV_VAR):
        return prelude_program()
    text, where = prelude_text(path)
    src = parse_source(text, where, known_ctors={})
    return load_program(src, None, where)


def default_prelude() -> Program:
    return load_prelude(None)
