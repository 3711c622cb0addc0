"""Brute-force term enumeration, used as a test oracle for generation.

Builds every application tree over a fixed set of heads and keeps the ones
the checker accepts. No constraint threading: a tree is built first and its
type is looked at afterwards.
"""
from __future__ import annotations

from typing import Iterable, Optional, Sequence

from .constraints import EMPTY, ConstraintSet, instantiate, try_unify
from .syntax import (
    App, Arrow, Context, Ctor, Equality, Expr, FreshSupply, TCon, Type, UVar,
    Var, free_uvars,
)
from .typecheck import check_expr


def component_heads(ctx: Context, names: Optional[Iterable[str]] = None) -> list[Expr]:
    """Heads for ``names`` (default: every variable, then every constructor)."""
    if names is None:
        names = list(ctx.vars) + list(ctx.ctors)
    out = []
    for n in names:
        out.append(Ctor(n) if ctx.has_ctor(n) and n not in ctx.vars else Var(n))
    return out


def application_trees(heads: Sequence[Expr], max_size: int) -> list[Expr]:
    """All application trees with at most ``max_size`` nodes, smallest first."""
    by_size: dict[int, list[Expr]] = {1: list(heads)}
    for n in range(3, max_size + 1, 2):
        by_size[n] = [App(f, a)
                      for left in range(1, n - 1, 2)
                      for f in by_size[left]
                      for a in by_size[n - 1 - left]]
    return [e for n in sorted(by_size) for e in by_size[n]]


class _Typer:
    """Principal types of application trees, computed bottom-up."""

    def __init__(self, ctx: Context):
        self.ctx = ctx
        ids = set()
        for s in ctx.vars.values():
            ids |= free_uvars(s.body)
        self.supply = FreshSupply(max(ids, default=0) + 1)

    def head(self, e: Expr) -> Optional[Type]:
        match e:
            case Var(n):
                scheme = self.ctx.vars[n]
            case Ctor(n):
                scheme = self.ctx.ctor(n).scheme()
            case _:
                raise TypeError(f"not a head: {e!r}")
        body, bundled, _ = instantiate(scheme, self.supply)
        return self._solve(bundled, body)

    def app(self, tf: Type, ta: Type) -> Optional[Type]:
        ta = self._refresh(ta)  # the argument may share a subtree with the function
        beta = self.supply.uvar()
        return self._solve([Equality(tf, Arrow(ta, beta))], beta)

    def _solve(self, eqs, t: Type) -> Optional[Type]:
        if not eqs:
            return t
        theta = try_unify([(e.lhs, e.rhs) for e in eqs])
        return theta.apply(t) if theta is not None else None

    def _refresh(self, t: Type) -> Type:
        ren = {i: self.supply.uvar() for i in sorted(free_uvars(t))}

        def go(t):
            match t:
                case UVar(i):
                    return ren[i]
                case TCon(h, args):
                    return TCon(h, tuple(go(a) for a in args)) if args else t
                case Arrow(d, c):
                    return Arrow(go(d), go(c))
            return t
        return go(t) if ren else t


def typed_trees(ctx: Context, heads: Sequence[Expr], max_size: int) -> list[tuple[Expr, Type]]:
    """Typable application trees with their principal types. An application
    is typable only when both parts are, so untypable trees are dropped as
    soon as they are built without losing anything."""
    typer = _Typer(ctx)
    by_size: dict[int, list] = {1: []}
    for h in heads:
        t = typer.head(h)
        if t is not None:
            by_size[1].append((h, t))
    for n in range(3, max_size + 1, 2):
        level = []
        for left in range(1, n - 1, 2):
            for f, tf in by_size[left]:
                for a, ta in by_size[n - 1 - left]:
                    t = typer.app(tf, ta)
                    if t is not None:
                        level.append((App(f, a), t))
        by_size[n] = level
    return [pair for n in sorted(by_size) for pair in by_size[n]]


def brute_force_enumerate(ctx: Context, goal: Type, max_size: int,
                          names: Optional[Iterable[str]] = None,
                          constraints: ConstraintSet = EMPTY) -> set[Expr]:
    """Every application/variable term of at most ``max_size`` nodes that
    checks against ``goal``. Lambdas are never produced."""
    return brute_force_many(ctx, [goal], max_size, names, constraints)[goal]


def brute_force_many(ctx: Context, goals: Sequence[Type], max_size: int,
                     names: Optional[Iterable[str]] = None,
                     constraints: ConstraintSet = EMPTY) -> dict:
    """``brute_force_enumerate`` for several goals over one tree set."""
    heads = component_heads(ctx, names)
    if constraints.equalities():
        # principal types ignore local equalities; check every tree instead
        trees = [(e, None) for e in application_trees(heads, max_size)]
    else:
        trees = typed_trees(ctx, heads, max_size)
    out = {}
    for goal in goals:
        found = set()
        for e, t in trees:
            # cheap necessary condition first; the checker has the last word
            if t is not None and try_unify([(t, goal)]) is None:
                continue
            if check_expr(constraints, ctx, e, goal):
                found.add(e)
        out[goal] = found
    return out
