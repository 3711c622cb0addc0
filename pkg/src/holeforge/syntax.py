"""Core data of the object language: types, terms, values, examples, contexts."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union


# ---------------------------------------------------------------------------
# Monotypes

@dataclass(frozen=True, slots=True)
class UVar:
    """Unification variable, minted only by a FreshSupply."""
    id: int


@dataclass(frozen=True, slots=True)
class TVar:
    """Rigid (universally quantified) type variable."""
    name: str


@dataclass(frozen=True, slots=True)
class TCon:
    head: str
    args: tuple = ()


@dataclass(frozen=True, slots=True)
class Arrow:
    dom: "Type"
    cod: "Type"


Type = Union[UVar, TVar, TCon, Arrow]

LIST = "List"
INT = "Int"


def arrows(*types: Type) -> Type:
    """Right-nested arrow: arrows(a, b, c) == a -> (b -> c)."""
    result = types[-1]
    for t in reversed(types[:-1]):
        result = Arrow(t, result)
    return result


def split_arrows(t: Type) -> tuple[list[Type], Type]:
    doms = []
    while isinstance(t, Arrow):
        doms.append(t.dom)
        t = t.cod
    return doms, t


def type_key(t: Type) -> tuple:
    """Total order on types; used to normalize equality orientation."""
    match t:
        case UVar(i):
            return (0, i)
        case TVar(n):
            return (1, n)
        case TCon(h, args):
            return (2, h, tuple(type_key(a) for a in args))
        case Arrow(d, c):
            return (3, type_key(d), type_key(c))
    raise TypeError(f"not a type: {t!r}")


def type_vars(t: Type) -> Iterator[Union[UVar, TVar]]:
    match t:
        case UVar() | TVar():
            yield t
        case TCon(_, args):
            for a in args:
                yield from type_vars(a)
        case Arrow(d, c):
            yield from type_vars(d)
            yield from type_vars(c)


def rigid_vars(t: Type) -> set[str]:
    return {v.name for v in type_vars(t) if isinstance(v, TVar)}


def rename_rigid(t: Type, mapping: dict) -> Type:
    """Replace rigid variables by name; ``mapping`` values are types."""
    match t:
        case TVar(n):
            return mapping.get(n, t)
        case TCon(h, args):
            return TCon(h, tuple(rename_rigid(a, mapping) for a in args)) if args else t
        case Arrow(d, c):
            return Arrow(rename_rigid(d, mapping), rename_rigid(c, mapping))
    return t


@dataclass(frozen=True, slots=True)
class Equality:
    """An unordered type equality ``lhs ~ rhs``.

    Orientation is normalized at construction so that flipped duplicates
    compare (and hash) equal.
    """
    lhs: Type
    rhs: Type

    def __init__(self, lhs: Type, rhs: Type):
        if type_key(rhs) < type_key(lhs):
            lhs, rhs = rhs, lhs
        object.__setattr__(self, "lhs", lhs)
        object.__setattr__(self, "rhs", rhs)


@dataclass(frozen=True, slots=True)
class Scheme:
    quantified: tuple = ()
    constraints: tuple = ()  # bundled equalities
    body: Type = TCon("Unit")

    @staticmethod
    def mono(t: Type) -> "Scheme":
        return Scheme((), (), t)


# ---------------------------------------------------------------------------
# Expressions

@dataclass(frozen=True, slots=True)
class PolyConst:
    name: str


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Ctor:
    name: str


@dataclass(frozen=True, slots=True)
class Lam:
    binder: str
    body: "Expr"


@dataclass(frozen=True, slots=True)
class App:
    fn: "Expr"
    arg: "Expr"


@dataclass(frozen=True, slots=True)
class MatchBranch:
    ctor: str
    binders: tuple
    body: "Expr"


@dataclass(frozen=True, slots=True)
class Case:
    scrutinee: "Expr"
    branches: tuple


@dataclass(frozen=True, slots=True)
class Hole:
    id: str


Expr = Union[PolyConst, Var, Ctor, Lam, App, Case, Hole]


def apply_spine(head: Expr, args: Iterable[Expr]) -> Expr:
    for a in args:
        head = App(head, a)
    return head


def spine(e: Expr) -> tuple[Expr, list[Expr]]:
    args = []
    while isinstance(e, App):
        args.append(e.arg)
        e = e.fn
    args.reverse()
    return e, args


def expr_size(e: Expr) -> int:
    match e:
        case Lam(_, body):
            return 1 + expr_size(body)
        case App(f, a):
            return 1 + expr_size(f) + expr_size(a)
        case Case(s, branches):
            return 1 + expr_size(s) + sum(expr_size(b.body) for b in branches)
    return 1


def count_apps(e: Expr) -> int:
    match e:
        case App(f, a):
            return 1 + count_apps(f) + count_apps(a)
        case Lam(_, body):
            return count_apps(body)
        case Case(s, branches):
            return count_apps(s) + sum(count_apps(b.body) for b in branches)
    return 0


def holes(e: Expr) -> Iterator[Hole]:
    match e:
        case Hole():
            yield e
        case Lam(_, body):
            yield from holes(body)
        case App(f, a):
            yield from holes(f)
            yield from holes(a)
        case Case(s, branches):
            yield from holes(s)
            for b in branches:
                yield from holes(b.body)


def is_literal(name: str) -> bool:
    return name.isdigit()


# ---------------------------------------------------------------------------
# Values, examples, worlds

class ValueEnv:
    """Immutable variable -> value map; ``extend`` shadows."""

    __slots__ = ("_items",)

    def __init__(self, items: dict | None = None):
        self._items = dict(items) if items else {}

    def extend(self, name: str, value: "Value") -> "ValueEnv":
        new = ValueEnv.__new__(ValueEnv)
        new._items = {**self._items, name: value}
        return new

    def extend_many(self, pairs: Iterable[tuple[str, "Value"]]) -> "ValueEnv":
        new = ValueEnv.__new__(ValueEnv)
        new._items = {**self._items, **dict(pairs)}
        return new

    def lookup(self, name: str) -> "Value":
        try:
            return self._items[name]
        except KeyError:
            raise UnboundName(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self._items

    def items(self):
        return self._items.items()

    def __len__(self):
        return len(self._items)

    def __repr__(self):
        return f"ValueEnv({self._items!r})"


class UnboundName(LookupError):
    pass


@dataclass(frozen=True, slots=True)
class PolyConstV:
    name: str


@dataclass(frozen=True, slots=True, eq=False)
class Closure:
    binder: str
    body: Expr
    captured: ValueEnv


@dataclass(frozen=True, slots=True)
class CtorV:
    name: str
    args: tuple = ()


Value = Union[PolyConstV, Closure, CtorV]


@dataclass(frozen=True, slots=True)
class ConstEx:
    name: str


@dataclass(frozen=True, slots=True)
class CtorEx:
    name: str
    args: tuple = ()


@dataclass(frozen=True, slots=True)
class IOEx:
    input: Value
    output: "Example"


Example = Union[ConstEx, CtorEx, IOEx]


@dataclass(frozen=True)
class TopExample:
    constants: tuple  # of (const-name, type-variable-name)
    rows: tuple

    def __post_init__(self):
        names = [c for c, _ in self.constants]
        if len(names) != len(set(names)):
            raise ValueError("duplicate polymorphic constant")
        if not self.rows:
            raise ValueError("a top-level example needs at least one row")


@dataclass(frozen=True)
class World:
    env: ValueEnv
    goal: Example


def example_to_value(x: Example) -> Value:
    match x:
        case ConstEx(n):
            return PolyConstV(n)
        case CtorEx(n, args):
            return CtorV(n, tuple(example_to_value(a) for a in args))
    raise ValueError("input-output examples are not values")


def value_to_example(v: Value) -> Example:
    match v:
        case PolyConstV(n):
            return ConstEx(n)
        case CtorV(n, args):
            return CtorEx(n, tuple(value_to_example(a) for a in args))
    raise ValueError("closures have no example form")


def io_rows(x: Example) -> tuple[list[Value], Example]:
    inputs = []
    while isinstance(x, IOEx):
        inputs.append(x.input)
        x = x.output
    return inputs, x


# ---------------------------------------------------------------------------
# Contexts

@dataclass(frozen=True)
class CtorSig:
    name: str
    quantified: tuple
    bundled: tuple
    arg_types: tuple
    result_head: str

    @property
    def arity(self) -> int:
        return len(self.arg_types)

    def result_type(self) -> Type:
        return TCon(self.result_head, tuple(TVar(a) for a in self.quantified))

    def scheme(self) -> Scheme:
        return Scheme(self.quantified, self.bundled, arrows(*self.arg_types, self.result_type()))


def literal_sig(name: str) -> CtorSig:
    return CtorSig(name, (), (), (), INT)


@dataclass(frozen=True)
class DataDecl:
    name: str
    params: tuple
    ctors: tuple
    opaque: bool = False


@dataclass(frozen=True)
class Context:
    vars: dict = field(default_factory=dict)
    ctors: dict = field(default_factory=dict)
    poly_consts: dict = field(default_factory=dict)
    datatypes: dict = field(default_factory=dict)

    def ctor(self, name: str) -> CtorSig:
        if is_literal(name):
            return literal_sig(name)
        return self.ctors[name]

    def has_ctor(self, name: str) -> bool:
        return is_literal(name) or name in self.ctors

    def with_vars(self, pairs: Iterable[tuple[str, Scheme]]) -> "Context":
        return Context({**self.vars, **dict(pairs)}, self.ctors, self.poly_consts, self.datatypes)

    def with_var(self, name: str, scheme: Scheme) -> "Context":
        return self.with_vars([(name, scheme)])

    def with_poly_consts(self, pairs: Iterable[tuple[str, str]]) -> "Context":
        return Context(self.vars, self.ctors, {**self.poly_consts, **dict(pairs)}, self.datatypes)

    def datatype_ctors(self, head: str) -> tuple:
        decl = self.datatypes.get(head)
        return () if decl is None or decl.opaque else decl.ctors

    def is_scrutinizable(self, t: Type) -> bool:
        return isinstance(t, TCon) and bool(self.datatype_ctors(t.head))


# ---------------------------------------------------------------------------
# Fresh names

FRESH_PREFIX = "'"


class FreshSupply:
    """Strictly increasing id source for one synthesis session.

    Minted names carry a prefix that the lexer never produces.
    """

    def __init__(self, start: int = 0):
        self.counter = start

    def next_id(self) -> int:
        self.counter += 1
        return self.counter

    def uvar(self) -> UVar:
        return UVar(self.next_id())

    def name(self, stem: str = "x") -> str:
        return f"{FRESH_PREFIX}{stem}{self.next_id()}"


# ---------------------------------------------------------------------------

def free_uvars(x) -> set[int]:
    """Ids of unification variables occurring in a type, equality,
    constraint set, or substitution."""
    from .constraints import ConstraintSet, Subst

    match x:
        case UVar() | TVar() | TCon() | Arrow():
            return {v.id for v in type_vars(x) if isinstance(v, UVar)}
        case Equality(l, r):
            return free_uvars(l) | free_uvars(r)
        case ConstraintSet():
            out = set()
            for eq in x.equalities():
                out |= free_uvars(eq)
            return out
        case Subst():
            out = {k.id for k in x.mapping if isinstance(k, UVar)}
            for v in x.mapping.values():
                out |= free_uvars(v)
            return out
    raise TypeError(f"cannot take free unification variables of {x!r}")


_CONST_RE = re.compile(r"^([a-z][a-z']*)(\d+)$")


def constant_type_var(name: str, quantified: Iterable[str]) -> str | None:
    """For example identifiers like ``a1``: the type variable they inhabit."""
    m = _CONST_RE.match(name)
    if m and m.group(1) in set(quantified):
        return m.group(1)
    return None
