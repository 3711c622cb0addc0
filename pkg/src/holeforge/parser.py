"""Surface syntax: lexer, layout-aware recursive descent, example blocks.

The grammar is documented in docs/format.md. Declarations start in
column 1; anything indented continues the previous declaration. Case
alternatives use either braces and semicolons or one alternative per
line, aligned on a common column.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .diagnostics import Diagnostic
from .syntax import (
    App, Case, Closure, ConstEx, Ctor, CtorEx, CtorSig, CtorV, Equality,
    Expr, Hole, IOEx, Lam, LIST, MatchBranch, PolyConst, PolyConstV, Scheme,
    TCon, TVar, TopExample, Type, ValueEnv, Var, arrows, constant_type_var,
    is_literal, split_arrows, type_vars,
)

KEYWORDS = {"data", "where", "case", "of", "forall"}
OPTION_KEYS = ("ctx", "recArg", "depth", "maxCandidates")

CONS = ":"
NIL = "[]"


# ---------------------------------------------------------------------------
# Lexer

@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # lower upper int hole sym eof
    text: str
    line: int
    col: int
    bol: bool  # first token on its line


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<sym>\{@|@@|@\}|::|->|=>|[=~()\[\],;{}\\|:.])
  | (?P<hole>_[A-Za-z0-9_']*)
  | (?P<lower>[a-z][A-Za-z0-9_']*)
  | (?P<upper>[A-Z][A-Za-z0-9_']*)
  | (?P<int>[0-9]+)
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    bol = True
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise Diagnostic(f"unexpected character {text[pos]!r}", "E001",
                             line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
            bol = True
        elif kind in ("ws", "comment"):
            pass
        else:
            val = m.group()
            if kind == "lower" and val in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, val, line, col, bol))
            bol = False
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1, True))
    return out


# ---------------------------------------------------------------------------
# Parsed file

@dataclass(frozen=True)
class Options:
    ctx: Optional[tuple] = None
    rec_arg: Optional[int] = None
    depth: Optional[int] = None
    max_candidates: Optional[int] = None

    def items(self):
        out = []
        if self.ctx is not None:
            out.append(("ctx", self.ctx))
        if self.rec_arg is not None:
            out.append(("recArg", self.rec_arg))
        if self.depth is not None:
            out.append(("depth", self.depth))
        if self.max_candidates is not None:
            out.append(("maxCandidates", self.max_candidates))
        return out


@dataclass(frozen=True)
class DataSrc:
    name: str
    params: tuple
    ctors: tuple  # of CtorSig
    opaque: bool = False
    gadt: bool = False
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SigSrc:
    name: str
    scheme: Scheme
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BindSrc:
    name: str
    params: tuple
    body: Expr
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RawRow:
    name: str
    inputs: tuple  # of Expr
    output: Expr
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BlockSrc:
    name: str
    signature: Optional[Scheme]
    rows: tuple  # of RawRow
    options: Options
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Goal:
    name: str
    scheme: Scheme
    params: tuple
    hole: Hole
    examples: Optional[TopExample]
    options: Options
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SourceFile:
    datatypes: tuple
    signatures: tuple
    bindings: tuple
    blocks: tuple
    goals: tuple
    order: tuple = field(default=(), compare=False)  # declaration order for printing

    def signature(self, name: str) -> Optional[Scheme]:
        for s in self.signatures:
            if s.name == name:
                return s.scheme
        return None


# ---------------------------------------------------------------------------
# Token cursor with layout fences

class _Cursor:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.i = 0
        self.fence = 0  # tokens starting a line left of the fence end the current item

    def raw(self, k: int = 0) -> Token:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def peek(self, k: int = 0) -> Token:
        for j in range(k + 1):
            t = self.raw(j)
            if t.kind == "eof" or (t.bol and t.col < self.fence):
                return Token("eof", "", t.line, t.col, True)
        return self.raw(k)

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind in ("sym", "kw") and t.text == text

    def next(self) -> Token:
        t = self.peek()
        if t.kind == "eof":
            raise self.error("unexpected end of declaration")
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text or t.kind not in ("sym", "kw"):
            raise self.error(f"expected {text!r}, found {t.text or 'end of declaration'!r}")
        self.i += 1
        return t

    def error(self, msg: str, code: str = "E002") -> Diagnostic:
        t = self.raw()
        return Diagnostic(msg, code, t.line, t.col)


# ---------------------------------------------------------------------------
# Types

def _parse_type(c: _Cursor) -> Type:
    left = _parse_btype(c)
    if c.at("->"):
        c.next()
        return arrows(left, _parse_type(c))
    return left


def _parse_btype(c: _Cursor) -> Type:
    t = c.peek()
    if t.kind == "upper":
        c.next()
        args = []
        while _starts_atype(c.peek()):
            args.append(_parse_atype(c))
        return TCon(t.text, tuple(args))
    return _parse_atype(c)


def _starts_atype(t: Token) -> bool:
    return t.kind in ("lower", "upper") or (t.kind == "sym" and t.text in ("(", "["))


def _parse_atype(c: _Cursor) -> Type:
    t = c.next()
    if t.kind == "lower":
        return TVar(t.text)
    if t.kind == "upper":
        return TCon(t.text)
    if t.text == "[":
        inner = _parse_type(c)
        c.expect("]")
        return TCon(LIST, (inner,))
    if t.text == "(":
        inner = _parse_type(c)
        c.expect(")")
        return inner
    c.i -= 1
    raise c.error(f"expected a type, found {t.text!r}")


def _parse_context(c: _Cursor) -> list[Equality] | None:
    """``(t ~ t, ...) =>`` or ``t ~ t =>``; None (and no input consumed) if absent."""
    start = c.i
    try:
        eqs = []
        if c.at("("):
            c.next()
            while True:
                lhs = _parse_type(c)
                c.expect("~")
                eqs.append((lhs, _parse_type(c)))
                if c.at(","):
                    c.next()
                    continue
                break
            c.expect(")")
        else:
            lhs = _parse_type(c)
            c.expect("~")
            eqs.append((lhs, _parse_type(c)))
        c.expect("=>")
        return eqs
    except Diagnostic:
        c.i = start
        return None


def _ordered_vars(types) -> list[str]:
    seen: list[str] = []
    for t in types:
        for v in type_vars(t):
            if isinstance(v, TVar) and v.name not in seen:
                seen.append(v.name)
    return seen


def _parse_sig_parts(c: _Cursor):
    explicit = None
    if c.at("forall"):
        c.next()
        explicit = []
        while c.peek().kind == "lower":
            explicit.append(c.next().text)
        c.expect(".")
    ctx = _parse_context(c) or []
    body = _parse_type(c)
    return explicit, ctx, body


def parse_scheme(c: _Cursor) -> Scheme:
    explicit, ctx, body = _parse_sig_parts(c)
    flat = [t for pair in ctx for t in pair] + [body]
    free = _ordered_vars(flat)
    if explicit is not None:
        missing = [v for v in free if v not in explicit]
        if missing:
            raise c.error(f"type variable {missing[0]} is not bound by forall", "E007")
        quantified = tuple(explicit)
    else:
        quantified = tuple(free)
    return Scheme(quantified, tuple(Equality(a, b) for a, b in ctx), body)


# ---------------------------------------------------------------------------
# Expressions

def _parse_expr(c: _Cursor) -> Expr:
    if c.at("\\"):
        c.next()
        names = []
        while c.peek().kind == "lower":
            names.append(c.next().text)
        if not names:
            raise c.error("lambda needs at least one binder")
        c.expect("->")
        body = _parse_expr(c)
        for n in reversed(names):
            body = Lam(n, body)
        return body
    if c.at("case"):
        return _parse_case(c)
    left = _parse_app(c)
    if c.at(":"):
        c.next()
        right = _parse_expr(c)
        return App(App(Ctor(CONS), left), right)
    return left


def _starts_atom(t: Token) -> bool:
    if t.kind in ("lower", "upper", "int", "hole"):
        return True
    return t.kind == "sym" and t.text in ("(", "[")


def _parse_app(c: _Cursor) -> Expr:
    if not _starts_atom(c.peek()):
        t = c.peek()
        raise c.error(f"expected an expression, found {t.text or 'end of declaration'!r}")
    e = _parse_atom(c)
    while _starts_atom(c.peek()):
        e = App(e, _parse_atom(c))
    return e


def _parse_atom(c: _Cursor) -> Expr:
    t = c.next()
    match t.kind:
        case "lower":
            return Var(t.text)
        case "upper":
            return Ctor(t.text)
        case "int":
            return Ctor(str(int(t.text)))
        case "hole":
            return Hole(t.text[1:])
    if t.text == "(":
        if c.at(":") and c.at(")", 1):
            c.next()
            c.next()
            return Ctor(CONS)
        inner = _parse_expr(c)
        c.expect(")")
        return inner
    if t.text == "[":
        if c.at("]"):
            c.next()
            return Ctor(NIL)
        items = [_parse_expr(c)]
        while c.at(","):
            c.next()
            items.append(_parse_expr(c))
        c.expect("]")
        out: Expr = Ctor(NIL)
        for item in reversed(items):
            out = App(App(Ctor(CONS), item), out)
        return out
    c.i -= 1
    raise c.error(f"expected an expression, found {t.text!r}")


def _parse_case(c: _Cursor) -> Expr:
    c.expect("case")
    scrut = _parse_expr(c)
    c.expect("of")
    branches = []
    saved = c.fence
    if c.at("{"):
        c.next()
        c.fence = 0  # explicit braces switch layout off
        while True:
            branches.append(_parse_alt(c))
            if c.at(";"):
                c.next()
                if c.at("}"):
                    break
                continue
            break
        c.expect("}")
        c.fence = saved
        return Case(scrut, tuple(branches))
    first = c.peek()
    if first.kind == "eof":
        raise c.error("case needs at least one alternative")
    col = first.col
    while True:
        # the next alternative starts back on column `col`
        branches.append(_parse_alt(c, body_fence=col + 1))
        nxt = c.peek()
        if nxt.kind != "eof" and nxt.bol and nxt.col == col:
            continue
        break
    return Case(scrut, tuple(branches))


def _parse_alt(c: _Cursor, body_fence: int | None = None) -> MatchBranch:
    ctor, binders = _parse_pattern(c)
    c.expect("->")
    saved = c.fence
    if body_fence is not None:
        c.fence = body_fence
    body = _parse_expr(c)
    c.fence = saved
    return MatchBranch(ctor, tuple(binders), body)


def _parse_pattern(c: _Cursor):
    t = c.peek()
    if t.kind == "sym" and t.text == "(" and not (c.at(":", 1) and c.at(")", 2)):
        c.next()
        out = _parse_pattern(c)
        c.expect(")")
        return out
    if t.kind == "lower" and c.at(":", 1):
        x = c.next().text
        c.next()
        y = c.next()
        if y.kind != "lower":
            raise c.error("expected a variable after ':' in pattern")
        return CONS, [x, y.text]
    head = _parse_atom(c)
    if not isinstance(head, Ctor):
        raise c.error("a pattern starts with a constructor")
    binders = []
    while c.peek().kind == "lower":
        binders.append(c.next().text)
    return head.name, binders


# ---------------------------------------------------------------------------
# Declarations

def _split_decls(toks: list[Token]) -> list[list[Token]]:
    decls: list[list[Token]] = []
    cur: list[Token] = []
    in_block = None
    for t in toks:
        if t.kind == "eof":
            break
        if in_block is not None:
            cur.append(t)
            if t.kind == "sym" and t.text == "@}":
                in_block = None
            elif t.kind == "sym" and t.text == "{@":
                raise Diagnostic("nested example block", "E003", t.line, t.col)
            continue
        if t.kind == "sym" and t.text == "@}":
            raise Diagnostic("'@}' without an open example block", "E003", t.line, t.col)
        if t.bol and t.col == 1 and cur:
            decls.append(cur)
            cur = []
        cur.append(t)
        if t.kind == "sym" and t.text == "{@":
            in_block = t
    if in_block is not None:
        raise Diagnostic("example block is not closed with '@}'", "E003", in_block.line, in_block.col)
    if cur:
        decls.append(cur)
    for d in decls:
        if d[0].col != 1:
            raise Diagnostic("declarations must start in column 1", "E002", d[0].line, d[0].col)
    return decls


def _cursor(toks: list[Token]) -> _Cursor:
    last = toks[-1]
    return _Cursor(toks + [Token("eof", "", last.line, last.col + len(last.text), True)])


def _finish(c: _Cursor):
    t = c.raw()
    if t.kind != "eof":
        raise c.error(f"unexpected {t.text!r}")


def _parse_data(c: _Cursor) -> DataSrc:
    line = c.expect("data").line
    if c.at("["):
        c.next()
        p = c.next()
        if p.kind != "lower":
            raise c.error("expected a type parameter")
        c.expect("]")
        name, params = LIST, (p.text,)
    else:
        t = c.next()
        if t.kind != "upper":
            c.i -= 1
            raise c.error("expected a datatype name")
        name = t.text
        params = []
        while c.peek().kind == "lower":
            params.append(c.next().text)
        params = tuple(params)
    if len(set(params)) != len(params):
        raise c.error("repeated type parameter", "E006")
    if c.peek().kind == "eof":
        return DataSrc(name, params, (), opaque=True, line=line)
    if c.at("where"):
        c.next()
        ctors = []
        while c.peek().kind != "eof":
            col = c.raw().col
            saved = c.fence
            cname = _parse_ctor_name(c)
            c.fence = col + 1
            c.expect("::")
            explicit, ctx, body = _parse_sig_parts(c)
            c.fence = saved
            ctors.append(_elaborate_gadt(c, name, params, cname, explicit, ctx, body))
        return DataSrc(name, params, tuple(ctors), gadt=True, line=line)
    c.expect("=")
    ctors = []
    while True:
        cname = _parse_ctor_name(c)
        args = []
        while _starts_atype(c.peek()):
            args.append(_parse_atype(c))
        free = _ordered_vars(args)
        for v in free:
            if v not in params:
                raise c.error(f"type variable {v} is not a parameter of {name}", "E007")
        ctors.append(CtorSig(cname, params, (), tuple(args), name))
        if c.at("|"):
            c.next()
            continue
        break
    return DataSrc(name, params, tuple(ctors), line=line)


def _parse_ctor_name(c: _Cursor) -> str:
    t = c.peek()
    if t.kind == "upper":
        c.next()
        return t.text
    if c.at("[") and c.at("]", 1):
        c.next()
        c.next()
        return NIL
    if c.at("(") and c.at(":", 1) and c.at(")", 2):
        c.next()
        c.next()
        c.next()
        return CONS
    raise c.error("expected a constructor name")


def _elaborate_gadt(c, dname, dparams, cname, explicit, ctx, body) -> CtorSig:
    args, result = split_arrows(body)
    if not (isinstance(result, TCon) and result.head == dname and len(result.args) == len(dparams)):
        raise c.error(f"constructor {cname} must return {dname} applied to {len(dparams)} argument(s)", "E005")
    mentioned = set(_ordered_vars(list(args) + [result] + [t for p in ctx for t in p]))
    quantified: list[str] = []
    bundled = [Equality(a, b) for a, b in ctx]
    for i, r in enumerate(result.args):
        if isinstance(r, TVar) and r.name not in quantified:
            quantified.append(r.name)
            continue
        base = dparams[i]
        fresh = base
        while fresh in mentioned or fresh in quantified:
            fresh += "'"
        quantified.append(fresh)
        bundled.append(Equality(TVar(fresh), r))
    free = _ordered_vars(list(args) + [t for p in ctx for t in p] + [result])
    for v in free:
        if v not in quantified:
            raise c.error(f"type variable {v} in {cname} does not occur in its result type", "E007")
    if explicit is not None:
        for v in free:
            if v not in explicit:
                raise c.error(f"type variable {v} is not bound by forall", "E007")
    return CtorSig(cname, tuple(quantified), tuple(bundled), tuple(args), dname)


def _parse_binding(c: _Cursor) -> BindSrc:
    t = c.next()
    params = []
    while c.peek().kind == "lower":
        params.append(c.next().text)
    c.expect("=")
    body = _parse_expr(c)
    return BindSrc(t.text, tuple(params), body, t.line, t.col)


def _parse_block(c: _Cursor) -> BlockSrc:
    open_tok = c.expect("{@")
    signature = None
    rows: list[RawRow] = []
    name = None
    while not (c.at("@@") or c.at("@}")):
        start = c.raw()
        if start.kind != "lower":
            raise c.error("expected an example row")
        if name is None:
            name = start.text
        elif start.text != name:
            raise c.error(f"example rows mix {name} and {start.text}")
        c.next()
        c.fence = start.col + 1
        if c.at("::"):
            c.next()
            if signature is not None or rows:
                raise c.error("the signature must come first in an example block")
            signature = parse_scheme(c)
        else:
            inputs = []
            while _starts_atom(c.peek()):
                inputs.append(_parse_atom(c))
            c.expect("=")
            rows.append(RawRow(start.text, tuple(inputs), _parse_expr(c), start.line, start.col))
        c.fence = 0
        if c.raw().kind == "eof":
            raise c.error("example block is not closed", "E003")
    opts = Options()
    if c.at("@@"):
        c.next()
        opts = _parse_options(c)
    c.expect("@}")
    if name is None:
        raise Diagnostic("empty example block", "E002", open_tok.line, open_tok.col)
    return BlockSrc(name, signature, tuple(rows), opts, open_tok.line)


def _parse_options(c: _Cursor) -> Options:
    found: dict = {}
    while not c.at("@}"):
        key = c.next()
        if key.kind != "lower" or key.text not in OPTION_KEYS:
            raise Diagnostic(f"unknown option {key.text!r} (known: {', '.join(OPTION_KEYS)})",
                             "E004", key.line, key.col)
        if key.text in found:
            raise Diagnostic(f"option {key.text} given twice", "E004", key.line, key.col)
        c.expect("=")
        if key.text == "ctx":
            c.expect("(")
            names = []
            while not c.at(")"):
                if c.at("(") and c.at(":", 1):
                    c.next(); c.next(); c.expect(")")
                    names.append(CONS)
                elif c.at("[") and c.at("]", 1):
                    c.next(); c.next()
                    names.append(NIL)
                else:
                    t = c.next()
                    if t.kind not in ("lower", "upper"):
                        raise Diagnostic("ctx lists names", "E015", t.line, t.col)
                    names.append(t.text)
                if c.at(","):
                    c.next()
                elif not c.at(")"):
                    raise c.error("expected ',' or ')' in ctx")
            c.expect(")")
            found["ctx"] = tuple(names)
        else:
            t = c.next()
            if t.kind != "int":
                raise Diagnostic(f"option {key.text} takes a number", "E015", t.line, t.col)
            n = int(t.text)
            if key.text != "recArg" and n <= 0:
                raise Diagnostic(f"option {key.text} must be positive", "E015", t.line, t.col)
            found[key.text] = n
        if c.at(","):
            c.next()
    return Options(found.get("ctx"), found.get("recArg"), found.get("depth"), found.get("maxCandidates"))


# ---------------------------------------------------------------------------
# Examples

def _expr_to_value(e: Expr, quantified, arities: dict, line: int, col: int):
    """Input position: must be a value."""
    match e:
        case Var(n):
            if constant_type_var(n, quantified):
                return PolyConstV(n)
            raise Diagnostic(f"{n} is neither a polymorphic constant nor a constructor", "E016", line, col)
        case Lam(x, body):
            return Closure(x, body, ValueEnv())
    head, args = _spine_of(e)
    if isinstance(head, Ctor):
        k = _ctor_arity(head.name, arities, line, col)
        if len(args) != k:
            raise Diagnostic(f"constructor {head.name} expects {k} argument(s) in an example",
                             "E012", line, col)
        return CtorV(head.name, tuple(_expr_to_value(a, quantified, arities, line, col) for a in args))
    raise Diagnostic("example input is not a value", "E010", line, col)


def _expr_to_example(e: Expr, quantified, arities: dict, line: int, col: int):
    match e:
        case Var(n):
            if constant_type_var(n, quantified):
                return ConstEx(n)
            raise Diagnostic(f"{n} is neither a polymorphic constant nor a constructor", "E016", line, col)
    head, args = _spine_of(e)
    if isinstance(head, Ctor):
        k = _ctor_arity(head.name, arities, line, col)
        if len(args) != k:
            raise Diagnostic(f"constructor {head.name} expects {k} argument(s) in an example",
                             "E012", line, col)
        return CtorEx(head.name, tuple(_expr_to_example(a, quantified, arities, line, col) for a in args))
    raise Diagnostic("example output must be a constructor value or constant", "E010", line, col)


def _spine_of(e):
    args = []
    while isinstance(e, App):
        args.append(e.arg)
        e = e.fn
    return e, args[::-1]


def _ctor_arity(name, arities, line, col) -> int:
    if is_literal(name):
        return 0
    if name not in arities:
        raise Diagnostic(f"unknown constructor {name}", "E011", line, col)
    return arities[name]


def resolve_rows(rows, scheme: Scheme, arities: dict) -> TopExample:
    """Turn raw rows into a TopExample; identifiers like ``a1`` become
    constants of the goal's type variable ``a``."""
    q = scheme.quantified
    out = []
    consts: list[tuple[str, str]] = []
    for r in rows:
        ex = _expr_to_example(r.output, q, arities, r.line, r.col)
        for inp in reversed(r.inputs):
            ex = IOEx(_expr_to_value(inp, q, arities, r.line, r.col), ex)
        out.append(ex)
        for n in _names(r):
            tv = constant_type_var(n, q)
            if tv and all(n != c for c, _ in consts):
                consts.append((n, tv))
    return TopExample(tuple(consts), tuple(out))


def _names(row: RawRow):
    def walk(e):
        match e:
            case Var(n):
                yield n
            case App(f, a):
                yield from walk(f)
                yield from walk(a)
            case Lam(_, b):
                yield from walk(b)
    for i in row.inputs:
        yield from walk(i)
    yield from walk(row.output)


def scheme_of(text: str) -> Scheme:
    """Parse a standalone type such as ``(a -> b) -> [a] -> [b]``."""
    c = _Cursor(tokenize(text))
    s = parse_scheme(c)
    _finish(c)
    return s


def parse_expr_text(text: str) -> Expr:
    c = _Cursor(tokenize(text))
    e = _parse_expr(c)
    _finish(c)
    return e


def parse_example_row(text: str, scheme: Scheme, arities: dict | None = None):
    """Parse one ``f v1 .. vn = rhs`` line into an Example."""
    if arities is None:
        arities = _default_arities()
    toks = tokenize(text)
    c = _Cursor(toks)
    t = c.next()
    if t.kind != "lower":
        raise c.error("expected an example row")
    inputs = []
    while _starts_atom(c.peek()):
        inputs.append(_parse_atom(c))
    c.expect("=")
    out = _parse_expr(c)
    _finish(c)
    row = RawRow(t.text, tuple(inputs), out, t.line, t.col)
    return resolve_rows([row], scheme, arities).rows[0]


def _default_arities() -> dict:
    from .prelude import prelude_context
    return {n: s.arity for n, s in prelude_context().ctors.items()}


# ---------------------------------------------------------------------------
# Files

def parse_source(text: str, path: str = "<input>", known_ctors: dict | None = None) -> SourceFile:
    """Parse a whole file. ``known_ctors`` maps constructor names from the
    prelude to their arities (used to read example blocks)."""
    try:
        return _parse_source(text, known_ctors)
    except Diagnostic as d:
        raise d.at(path)


def _parse_source(text: str, known_ctors: dict | None) -> SourceFile:
    toks = tokenize(text)
    datatypes, sigs, binds, blocks, order = [], [], [], [], []
    for decl in _split_decls(toks):
        c = _cursor(decl)
        first = decl[0]
        if first.kind == "kw" and first.text == "data":
            d = _parse_data(c)
            datatypes.append(d)
            order.append(("data", d.name))
        elif first.kind == "sym" and first.text == "{@":
            b = _parse_block(c)
            blocks.append(b)
            order.append(("block", b.name))
        elif first.kind == "lower" and len(decl) > 1 and decl[1].text == "::":
            c.next()
            c.next()
            s = SigSrc(first.text, parse_scheme(c), first.line)
            sigs.append(s)
            order.append(("sig", s.name))
        elif first.kind == "lower":
            b = _parse_binding(c)
            binds.append(b)
            order.append(("bind", b.name))
        else:
            raise Diagnostic(f"unexpected {first.text!r} at start of declaration", "E002",
                             first.line, first.col)
        _finish(c)

    _check_duplicates(sigs, binds, blocks, datatypes)
    arities = dict(_default_arities() if known_ctors is None else known_ctors)
    for d in datatypes:
        for k in d.ctors:
            arities[k.name] = k.arity
    goals = _collect_goals(sigs, binds, blocks, arities)
    return SourceFile(tuple(datatypes), tuple(sigs), tuple(binds), tuple(blocks), tuple(goals), tuple(order))


def _check_duplicates(sigs, binds, blocks, datatypes):
    for kind, items in (("signature", sigs), ("binding", binds), ("example block", blocks),
                        ("datatype", datatypes)):
        seen = set()
        for it in items:
            if it.name in seen:
                raise Diagnostic(f"duplicate {kind} for {it.name}", "E006", it.line, 1)
            seen.add(it.name)


def _contains_hole(e: Expr) -> bool:
    from .syntax import holes
    return next(holes(e), None) is not None


def _collect_goals(sigs, binds, blocks, arities) -> list[Goal]:
    sig_of = {s.name: s for s in sigs}
    block_of = {b.name: b for b in blocks}
    goals = []
    bound = {b.name for b in binds}
    for b in blocks:
        if b.name not in bound:
            raise Diagnostic(f"example block for {b.name}, which has no binding", "E014", b.line, 1)
    for b in binds:
        if not _contains_hole(b.body):
            continue
        if not isinstance(b.body, Hole):
            raise Diagnostic("a hole must be the entire body of its binding", "E017", b.line, b.col)
        blk = block_of.get(b.name)
        if b.name in sig_of:
            scheme = sig_of[b.name].scheme
        elif blk is not None and blk.signature is not None:
            scheme = blk.signature
        else:
            raise Diagnostic(f"goal {b.name} needs a type signature", "E018", b.line, b.col)
        if scheme.constraints:
            raise Diagnostic("goal signatures cannot carry equality constraints", "E008", b.line, b.col)
        arity = len(split_arrows(scheme.body)[0])
        if len(b.params) > arity:
            raise Diagnostic(f"{b.name} has {len(b.params)} parameter(s) but its type has {arity}",
                             "E005", b.line, b.col)
        examples, opts = None, Options()
        if blk is not None:
            if blk.signature is not None and not _same_scheme(blk.signature, scheme):
                raise Diagnostic(f"example block signature for {b.name} disagrees with its declaration",
                                 "E009", blk.line, 1)
            opts = blk.options
            if blk.rows:
                examples = resolve_rows(blk.rows, scheme, arities)
            if opts.rec_arg is not None and opts.rec_arg >= arity:
                raise Diagnostic(f"recArg={opts.rec_arg} but {b.name} takes {arity} argument(s)",
                                 "E015", blk.line, 1)
        goals.append(Goal(b.name, scheme, b.params, b.body, examples, opts, b.line))
    return goals


def _same_scheme(a: Scheme, b: Scheme) -> bool:
    if len(a.quantified) != len(b.quantified):
        return False
    from .syntax import rename_rigid
    ren = {x: TVar(y) for x, y in zip(a.quantified, b.quantified)}
    return rename_rigid(a.body, ren) == b.body
