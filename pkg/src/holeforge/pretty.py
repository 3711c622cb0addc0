"""Canonical printer for types, terms, examples and constraint sets.

Every piece of user-facing output goes through here: CLI candidates,
diagnostics, golden sidecars and traces.
"""
from __future__ import annotations

from typing import Iterable

from .syntax import (
    App, Arrow, Case, ConstEx, Ctor, CtorEx, CtorV, Closure, Equality, Expr,
    FRESH_PREFIX, Hole, IOEx, Lam, LIST, MatchBranch, PolyConst, PolyConstV,
    Scheme, TCon, TVar, Type, UVar, Var, Value, example_to_value,
)

CONS = ":"
NIL = "[]"


# ---------------------------------------------------------------------------
# Types

def show_type(t: Type) -> str:
    match t:
        case UVar(i):
            return f"{FRESH_PREFIX}t{i}"
        case TVar(n):
            return n
        case TCon(h, args):
            if h == LIST and len(args) == 1:
                return f"[{show_type(args[0])}]"
            if not args:
                return h
            return " ".join([h] + [_type_atom(a) for a in args])
        case Arrow(d, c):
            left = show_type(d)
            if isinstance(d, Arrow):
                left = f"({left})"
            return f"{left} -> {show_type(c)}"
    raise TypeError(f"not a type: {t!r}")


def _type_atom(t: Type) -> str:
    s = show_type(t)
    if isinstance(t, Arrow) or (isinstance(t, TCon) and t.args and t.head != LIST):
        return f"({s})"
    return s


def show_equality(e: Equality) -> str:
    return f"{show_type(e.lhs)} ~ {show_type(e.rhs)}"


def show_constraints(c) -> str:
    """``{t1 ~ t2, ...}``; givens (if any) are listed after a bar."""
    from .constraints import _eq_key
    wanted = ", ".join(show_equality(e) for e in sorted(c.wanteds, key=_eq_key))
    if not c.givens:
        return "{" + wanted + "}"
    given = ", ".join(show_equality(e) for e in sorted(c.givens, key=_eq_key))
    return "{" + wanted + " | given " + given + "}"


def show_scheme(s: Scheme) -> str:
    body = show_type(s.body)
    if s.constraints:
        ctx = ", ".join(show_equality(e) for e in s.constraints)
        if len(s.constraints) > 1:
            ctx = f"({ctx})"
        body = f"{ctx} => {body}"
    if s.quantified:
        body = f"forall {' '.join(s.quantified)}. {body}"
    return body


# ---------------------------------------------------------------------------
# Terms

def ctor_name(name: str) -> str:
    return "(:)" if name == CONS else name


def show_expr(e: Expr) -> str:
    """Multi-line canonical form: one case branch per line."""
    return "\n".join(expr_lines(e))


def expr_lines(e: Expr) -> list[str]:
    match e:
        case Case(s, branches):
            head = f"case {_inline_or_paren(s)} of"
            out = [head]
            for b in branches:
                pat = " ".join([ctor_name(b.ctor), *b.binders])
                body = expr_lines(b.body)
                out.append(f"  {pat} -> {body[0]}")
                out.extend("  " + line for line in body[1:])
            return out
        case Lam(x, body):
            lines = expr_lines(body)
            return [f"\\{x} -> {lines[0]}", *lines[1:]]
        case App():
            head, args = _spine(e)
            lines = _atom_lines(head, fn_pos=True)
            for a in args:
                arg = _atom_lines(a, fn_pos=False)
                lines = lines[:-1] + [lines[-1] + " " + arg[0]] + arg[1:]
            return lines
    return [_leaf(e)]


def _spine(e):
    args = []
    while isinstance(e, App):
        args.append(e.arg)
        e = e.fn
    return e, args[::-1]


def _atom_lines(e: Expr, fn_pos: bool) -> list[str]:
    lines = expr_lines(e)
    needs = isinstance(e, (Lam, Case)) or (not fn_pos and isinstance(e, App))
    if needs:
        lines = ["(" + lines[0]] + lines[1:]
        lines[-1] += ")"
    return lines


def _inline_or_paren(e: Expr) -> str:
    s = show_inline(e)
    return f"({s})" if isinstance(e, (Lam, Case)) else s


def _leaf(e: Expr) -> str:
    match e:
        case Var(n) | PolyConst(n):
            return n
        case Ctor(n):
            return ctor_name(n)
        case Hole(i):
            return "_" if i == "" else f"_{i}"
    raise TypeError(f"not an expression: {e!r}")


def show_inline(e: Expr) -> str:
    """Single-line form (traces, JSON, sidecars)."""
    match e:
        case Case(s, branches):
            alts = "; ".join(
                " ".join([ctor_name(b.ctor), *b.binders]) + " -> " + show_inline(b.body)
                for b in branches)
            return f"case {_inline_or_paren(s)} of {{ {alts} }}"
        case Lam(x, body):
            return f"\\{x} -> {show_inline(body)}"
        case App():
            head, args = _spine(e)
            parts = [_inline_atom(head, True)] + [_inline_atom(a, False) for a in args]
            return " ".join(parts)
    return _leaf(e)


def _inline_atom(e: Expr, fn_pos: bool) -> str:
    s = show_inline(e)
    if isinstance(e, (Lam, Case)) or (not fn_pos and isinstance(e, App)):
        return f"({s})"
    return s


# ---------------------------------------------------------------------------
# Values and examples

def show_value(v: Value) -> str:
    match v:
        case PolyConstV(n):
            return n
        case CtorV(n, args):
            items = _list_items(v)
            if items is not None:
                return "[" + ", ".join(show_value(x) for x in items) + "]"
            if not args:
                return ctor_name(n)
            return " ".join([ctor_name(n)] + [_value_atom(a) for a in args])
        case Closure(x, body, _):
            return f"<\\{x} -> {show_inline(body)}>"
    return repr(v)


def _list_items(v):
    items = []
    while isinstance(v, CtorV) and v.name == CONS and len(v.args) == 2:
        items.append(v.args[0])
        v = v.args[1]
    if isinstance(v, CtorV) and v.name == NIL and not v.args:
        return items
    return None


def _value_atom(v) -> str:
    s = show_value(v)
    if isinstance(v, CtorV) and v.args and _list_items(v) is None:
        return f"({s})"
    return s


def show_example(x) -> str:
    match x:
        case ConstEx(n):
            return n
        case CtorEx(n, args):
            try:
                return show_value(example_to_value(x))
            except ValueError:
                return " ".join([ctor_name(n)] + [f"({show_example(a)})" for a in args])
        case IOEx(i, o):
            return f"{_value_atom(i)} => {show_example(o)}"
    return repr(x)


# ---------------------------------------------------------------------------
# Alpha-canonical forms

def alpha_canonical(e: Expr) -> Expr:
    """Rename every bound variable to b0, b1, ... in binding order."""
    counter = [0]

    def fresh():
        n = f"b{counter[0]}"
        counter[0] += 1
        return n

    def go(e: Expr, env: dict) -> Expr:
        match e:
            case Var(n):
                return Var(env.get(n, n))
            case Lam(x, body):
                y = fresh()
                return Lam(y, go(body, {**env, x: y}))
            case App(f, a):
                f2 = go(f, env)
                return App(f2, go(a, env))
            case Case(s, branches):
                s2 = go(s, env)
                out = []
                for b in branches:
                    names = [fresh() for _ in b.binders]
                    inner = {**env, **dict(zip(b.binders, names))}
                    out.append(MatchBranch(b.ctor, tuple(names), go(b.body, inner)))
                return Case(s2, tuple(out))
        return e

    return go(e, {})


def alpha_key(e: Expr) -> str:
    return show_inline(alpha_canonical(e))


def canonical_equality(eq: Equality) -> frozenset:
    """Orientation-free rendering with unification variables renumbered by
    first occurrence, for comparing equalities up to renaming."""
    out = set()
    for lhs, rhs in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
        names: dict = {}
        out.add(_canon_type(lhs, names) + " ~ " + _canon_type(rhs, names))
    return frozenset(out)


def _canon_type(t: Type, names: dict) -> str:
    match t:
        case UVar(i):
            if t not in names:
                names[t] = f"v{len(names)}"
            return names[t]
        case TVar(n):
            return n
        case TCon(h, args):
            return "(" + " ".join([h] + [_canon_type(a, names) for a in args]) + ")"
        case Arrow(d, c):
            return "(" + _canon_type(d, names) + " -> " + _canon_type(c, names) + ")"
    raise TypeError(t)


def show_bullets(lines: Iterable[str]) -> str:
    return "\n".join(f"  {line}" for line in lines)


# ---------------------------------------------------------------------------
# Whole files

def show_source(src) -> str:
    """Print a parsed file back in surface syntax, declarations in their
    original order. Comments and layout are not preserved."""
    datas = {d.name: d for d in src.datatypes}
    sigs = {s.name: s for s in src.signatures}
    binds = {b.name: b for b in src.bindings}
    blocks = {b.name: b for b in src.blocks}
    out = []
    for kind, name in src.order:
        match kind:
            case "data":
                out.append(_show_data(datas[name]))
            case "sig":
                out.append(f"{name} :: {show_scheme(sigs[name].scheme)}")
            case "bind":
                out.append(_show_binding(binds[name]))
            case "block":
                out.append(_show_block(blocks[name]))
    return "\n\n".join(out) + "\n"


def _show_data(d) -> str:
    head = "[" + d.params[0] + "]" if d.name == LIST else " ".join([d.name, *d.params])
    if d.opaque:
        return f"data {head}"
    if d.gadt:
        lines = [f"data {head} where"]
        for k in d.ctors:
            lines.append(f"  {ctor_name(k.name)} :: {_show_ctor_type(k)}")
        return "\n".join(lines)
    alts = []
    for k in d.ctors:
        alts.append(" ".join([ctor_name(k.name), *(_type_atom(t) for t in k.arg_types)]))
    return f"data {head} = " + " | ".join(alts)


def _show_ctor_type(k) -> str:
    t = k.result_type()
    for a in reversed(k.arg_types):
        t = Arrow(a, t)
    body = show_type(t)
    if k.bundled:
        ctx = ", ".join(show_equality(e) for e in k.bundled)
        body = f"({ctx}) => {body}"
    return body


def _show_binding(b) -> str:
    lines = expr_lines(b.body)
    head = " ".join([b.name, *b.params])
    return "\n".join([f"{head} = {lines[0]}"] + ["  " + line for line in lines[1:]])


def _show_block(b) -> str:
    lines = ["{@"]
    if b.signature is not None:
        lines.append(f"  {b.name} :: {show_scheme(b.signature)}")
    for r in b.rows:
        parts = [r.name] + [_inline_atom(i, False) for i in r.inputs]
        lines.append("  " + " ".join(parts) + " = " + show_inline(r.output))
    opts = b.options.items()
    if opts:
        lines.append("@@")
        for key, val in opts:
            if key == "ctx":
                val = "(" + ", ".join(ctor_name(n) for n in val) + ")"
            lines.append(f"  {key}={val}")
    lines.append("@}")
    return "\n".join(lines)
