"""Helpers shared by the test modules."""
from __future__ import annotations

import random
from pathlib import Path

from holeforge.constraints import EMPTY
from holeforge.evaluate import SATISFIED, ExampleFn, Val
from holeforge.pretty import alpha_key
from holeforge.program import load_text
from holeforge.synth import _table
from holeforge.syntax import Arrow, TCon, TVar, split_arrows
from holeforge.typecheck import check_scheme

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def corpus_files() -> list[Path]:
    return sorted(CORPUS.glob("*.syn"))


def load_corpus(name: str):
    path = CORPUS / name
    return load_text(path.read_text(encoding="utf-8"), str(path))


def keys(cands) -> list[str]:
    return [alpha_key(c.body) for c in cands]


def well_typed(program, goal, cand) -> bool:
    ctx = program.ctx.with_var(goal.name, goal.scheme)
    return check_scheme(ctx, cand.expr, goal.scheme)


def satisfies_rows(program, goal, cand, fuel: int = 10_000) -> bool:
    """Run the candidate on every top-level row with genuine recursion: the
    recursive name answers every call by running the candidate itself."""
    from holeforge.evaluate import Evaluator
    rows = goal.examples.rows if goal.examples is not None else ()
    ev = Evaluator(program.arities)
    arity = len(split_arrows(goal.scheme.body)[0])
    env = program.env
    fn = None
    if goal.options.rec_arg is not None:
        fn = ExampleFn(goal.name, arity, {})
        env = env.extend(goal.name, fn)
    r = ev.run(env, cand.expr, fuel)
    if not isinstance(r, Val):
        return False
    if fn is not None:
        fn.fallback = r.value
    return all(ev.value_satisfies(r.value, row, fuel) == SATISFIED for row in rows)


# ---------------------------------------------------------------------------
# random goals

BOOL = TCon("Bool")
INT = TCon("Int")


def maybe(t):
    return TCon("Maybe", (t,))


def lst(t):
    return TCon("List", (t,))


def random_value_text(rng: random.Random, t) -> str:
    match t:
        case TCon("Bool"):
            return rng.choice(["True", "False"])
        case TCon("Maybe", (a,)):
            if rng.random() < 0.3:
                return "Nothing"
            return f"(Just {random_value_text(rng, a)})"
        case TCon("List", (a,)):
            n = rng.randint(0, 2)
            return "[" + ", ".join(random_value_text(rng, a) for _ in range(n)) + "]"
    raise ValueError(t)


def show_mono(t) -> str:
    from holeforge.pretty import show_type
    return show_type(t)


def random_data_type(rng: random.Random, depth: int = 2, poly: bool = False):
    leaves = [BOOL] + ([TVar("a")] if poly else [])
    if depth == 0 or rng.random() < 0.4:
        return rng.choice(leaves)
    inner = random_data_type(rng, depth - 1, poly)
    return rng.choice([maybe, lst])(inner)


def random_goal_source(rng: random.Random, index: int) -> str:
    """A small file with one goal. Half the goals are polymorphic and come
    without examples; the rest are monomorphic with random rows."""
    poly = rng.random() < 0.5
    n_args = rng.randint(1, 2)
    args = [random_data_type(rng, poly=poly) for _ in range(n_args)]
    res = random_data_type(rng, poly=poly)
    if poly and not any("a" in show_mono(a) for a in args + [res]):
        args[0] = TVar("a")
    sig_t = " -> ".join(_arg(show_mono(a)) for a in args) + " -> " + show_mono(res)
    name = f"g{index}"
    params = " ".join(f"x{i}" for i in range(n_args))
    lines = []
    if not poly:
        rows = []
        seen = set()
        for _ in range(rng.randint(1, 3)):
            ins = tuple(random_value_text(rng, a) for a in args)
            if ins in seen:
                continue
            seen.add(ins)
            rows.append(f"  {name} {' '.join(ins)} = {random_value_text(rng, res)}")
        lines += ["{@", f"  {name} :: {sig_t}", *rows, "@@", "  maxCandidates=5", "@}"]
    lines += [f"{name} :: {sig_t}", f"{name} {params} = _", ""]
    return "\n".join(lines)


def _arg(s: str) -> str:
    return f"({s})" if "->" in s else s
