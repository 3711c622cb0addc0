"""Unification, entailment, consistency, and scheme instantiation.

A ``ConstraintSet`` holds two kinds of equalities:

* givens, introduced by matching on a constructor with bundled constraints
  (for ``Plus`` at ``Exp a``: ``a ~ Int``). Givens may solve rigid
  variables.
* wanteds, produced by inference and generation. In wanteds, rigid
  variables are skolem constants: only unification variables are solved.

Givens are solved first; wanteds are then solved under the given unifier.
The set is always carried with its solved form, so consistency is a flag
and extension only unifies the new equalities.
"""
from __future__ import annotations

from typing import Iterable, Optional, Union

from .syntax import (
    Arrow, Equality, FreshSupply, Scheme, TCon, TVar, Type, UVar, type_key,
)


class Inconsistent(Exception):
    """No unifier exists. ``equality`` is the clashing pair (solved form)."""

    def __init__(self, lhs: Type, rhs: Type, occurs: bool = False):
        self.lhs = lhs
        self.rhs = rhs
        self.occurs = occurs
        super().__init__(lhs, rhs)

    def __str__(self):
        # rendered on demand: search raises and discards these constantly
        from .pretty import show_type
        if self.occurs:
            return f"occurs check: cannot construct infinite type {show_type(self.lhs)} ~ {show_type(self.rhs)}"
        return f"cannot unify {show_type(self.lhs)} with {show_type(self.rhs)}"


Key = Union[UVar, TVar]


def _subst1(t: Type, var: Key, repl: Type) -> Type:
    match t:
        case UVar() | TVar():
            return repl if t == var else t
        case TCon(h, args):
            if not args:
                return t
            return TCon(h, tuple(_subst1(a, var, repl) for a in args))
        case Arrow(d, c):
            return Arrow(_subst1(d, var, repl), _subst1(c, var, repl))
    return t


def _occurs(var: Key, t: Type) -> bool:
    match t:
        case UVar() | TVar():
            return t == var
        case TCon(_, args):
            return any(_occurs(var, a) for a in args)
        case Arrow(d, c):
            return _occurs(var, d) or _occurs(var, c)
    return False


class Subst:
    """Idempotent finite map from variables to types."""

    __slots__ = ("mapping",)

    def __init__(self, mapping: dict | None = None):
        self.mapping = dict(mapping) if mapping else {}

    def apply(self, t: Type) -> Type:
        m = self.mapping
        if not m:
            return t
        match t:
            case UVar() | TVar():
                return m.get(t, t)
            case TCon(h, args):
                if not args:
                    return t
                return TCon(h, tuple(self.apply(a) for a in args))
            case Arrow(d, c):
                return Arrow(self.apply(d), self.apply(c))
        return t

    def apply_eq(self, eq: Equality) -> Equality:
        return Equality(self.apply(eq.lhs), self.apply(eq.rhs))

    def compose(self, first: "Subst") -> "Subst":
        """``self ∘ first``: applying the result equals applying ``first``
        then ``self``."""
        out = {k: self.apply(v) for k, v in first.mapping.items()}
        for k, v in self.mapping.items():
            out.setdefault(k, v)
        return Subst(out)

    def __eq__(self, other):
        return isinstance(other, Subst) and self.mapping == other.mapping

    def __hash__(self):
        return hash(frozenset(self.mapping.items()))

    def __repr__(self):
        from .pretty import show_type
        inner = ", ".join(f"{show_type(v)}/{show_type(k)}" for k, v in self.mapping.items())
        return f"[{inner}]"


def _bind(mapping: dict, var: Key, t: Type) -> None:
    if _occurs(var, t):
        raise Inconsistent(var, t, occurs=True)
    for k, v in mapping.items():
        mapping[k] = _subst1(v, var, t)
    mapping[var] = t


class _Raw:
    __slots__ = ("mapping",)

    def __init__(self, mapping):
        self.mapping = mapping

    apply = Subst.apply


def _solve(pairs: Iterable[tuple[Type, Type]], mapping: dict, rigid_solvable: bool) -> None:
    """Extend ``mapping`` (in place) to unify every pair."""
    view = _Raw(mapping)
    work = list(pairs)
    work.reverse()
    while work:
        s, t = work.pop()
        s = view.apply(s)
        t = view.apply(t)
        if s == t:
            continue
        if isinstance(s, UVar) and isinstance(t, UVar):
            # smaller id is the class representative
            if s.id < t.id:
                s, t = t, s
            _bind(mapping, s, t)
        elif isinstance(s, UVar):
            _bind(mapping, s, t)
        elif isinstance(t, UVar):
            _bind(mapping, t, s)
        elif rigid_solvable and isinstance(s, TVar) and isinstance(t, TVar):
            if s.name < t.name:
                s, t = t, s
            _bind(mapping, s, t)
        elif rigid_solvable and isinstance(s, TVar):
            _bind(mapping, s, t)
        elif rigid_solvable and isinstance(t, TVar):
            _bind(mapping, t, s)
        elif isinstance(s, TCon) and isinstance(t, TCon):
            if s.head != t.head or len(s.args) != len(t.args):
                raise Inconsistent(s, t)
            work.extend(reversed(list(zip(s.args, t.args))))
        elif isinstance(s, Arrow) and isinstance(t, Arrow):
            work.append((s.cod, t.cod))
            work.append((s.dom, t.dom))
        else:
            raise Inconsistent(s, t)


def _pairs(eqs: Iterable[Equality]):
    return [(e.lhs, e.rhs) for e in sorted(eqs, key=_eq_key)]


def _eq_key(e: Equality):
    return (type_key(e.lhs), type_key(e.rhs))


class ConstraintSet:
    """Immutable set of given and wanted equalities with a cached unifier."""

    __slots__ = ("givens", "wanteds", "_mapping", "_error", "_given_mapping")

    def __init__(self, wanteds: Iterable[Equality] = (), givens: Iterable[Equality] = ()):
        self.givens = frozenset(givens)
        self.wanteds = frozenset(wanteds)
        self._error = None
        self._mapping = None
        self._given_mapping = None
        mapping: dict = {}
        try:
            _solve(_pairs(self.givens), mapping, rigid_solvable=True)
        except Inconsistent as exc:
            self._error = exc
            return
        self._given_mapping = dict(mapping)
        try:
            _solve(_pairs(self.wanteds), mapping, rigid_solvable=False)
        except Inconsistent as exc:
            self._error = exc
            return
        self._mapping = mapping

    @classmethod
    def given(cls, eqs: Iterable[Equality]) -> "ConstraintSet":
        return cls((), eqs)

    # -- set behaviour --------------------------------------------------
    def equalities(self) -> frozenset:
        return self.givens | self.wanteds

    def __eq__(self, other):
        return (isinstance(other, ConstraintSet)
                and self.givens == other.givens and self.wanteds == other.wanteds)

    def __hash__(self):
        return hash((self.givens, self.wanteds))

    def __le__(self, other: "ConstraintSet") -> bool:
        return self.givens <= other.givens and self.wanteds <= other.wanteds

    def __len__(self):
        return len(self.givens) + len(self.wanteds)

    def __iter__(self):
        return iter(sorted(self.equalities(), key=_eq_key))

    # -- solved form ----------------------------------------------------
    @property
    def consistent(self) -> bool:
        return self._error is None

    @property
    def error(self) -> Inconsistent | None:
        return self._error

    @property
    def subst(self) -> Subst:
        if self._error is not None:
            raise self._error
        return Subst(self._mapping)

    def solve(self, t: Type) -> Type:
        assert self._error is None, "solving under inconsistent constraints"
        return _Raw(self._mapping).apply(t)

    # -- extension ------------------------------------------------------
    def add_wanted(self, eqs: Iterable[Equality]) -> "ConstraintSet":
        eqs = [e for e in eqs]
        new = ConstraintSet.__new__(ConstraintSet)
        new.givens = self.givens
        new.wanteds = self.wanteds.union(eqs)
        new._given_mapping = self._given_mapping
        new._mapping = None
        new._error = self._error
        if self._error is None:
            mapping = dict(self._mapping)
            try:
                # a list has a fixed order already; only sets need sorting
                _solve([(e.lhs, e.rhs) for e in eqs], mapping, rigid_solvable=False)
                new._mapping = mapping
            except Inconsistent as exc:
                new._error = exc
        return new

    def add_given(self, eqs: Iterable[Equality]) -> "ConstraintSet":
        return ConstraintSet(self.wanteds, self.givens.union(eqs))

    def union(self, other: "ConstraintSet") -> "ConstraintSet":
        if not (other.givens - self.givens):
            return self.add_wanted(other.wanteds - self.wanteds)
        return ConstraintSet(self.wanteds | other.wanteds, self.givens | other.givens)

    def map(self, subst: Subst) -> "ConstraintSet":
        return ConstraintSet([subst.apply_eq(e) for e in self.wanteds],
                             [subst.apply_eq(e) for e in self.givens])

    def __repr__(self):
        from .pretty import show_constraints
        return show_constraints(self)


EMPTY = ConstraintSet()


def unify(c: Union[ConstraintSet, Iterable[Equality]]) -> Subst:
    """Most general unifier of ``c``; raises ``Inconsistent``."""
    if not isinstance(c, ConstraintSet):
        c = ConstraintSet(c)
    return c.subst


def consistent(c: Union[ConstraintSet, Iterable[Equality]]) -> bool:
    if not isinstance(c, ConstraintSet):
        c = ConstraintSet(c)
    return c.consistent


def entails(c: ConstraintSet, eq: Union[Equality, Iterable[Equality]]) -> bool:
    assert c.consistent, "entailment from inconsistent constraints"
    eqs = [eq] if isinstance(eq, Equality) else list(eq)
    return all(c.solve(e.lhs) == c.solve(e.rhs) for e in eqs)


def solve_for(c: ConstraintSet, t: Type) -> Type:
    return c.solve(t)


def instantiate(s: Scheme, supply: FreshSupply) -> tuple[Type, list[Equality], Subst]:
    """Replace quantified variables by fresh unification variables."""
    if not s.quantified:
        return s.body, list(s.constraints), Subst()
    theta = Subst({TVar(a): supply.uvar() for a in s.quantified})
    return theta.apply(s.body), [theta.apply_eq(e) for e in s.constraints], theta


def try_unify(pairs: Iterable[tuple[Type, Type]]) -> Optional[Subst]:
    """Most general unifier of plain type pairs, or None. Skips the
    bookkeeping of ConstraintSet; rigid variables stay rigid."""
    mapping: dict = {}
    try:
        _solve(pairs, mapping, rigid_solvable=False)
    except Inconsistent:
        return None
    return Subst(mapping)
