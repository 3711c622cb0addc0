"""Command line: ``holeforge fill FILE`` and ``holeforge bench DIR``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .diagnostics import Diagnostic
from .evaluate import DEFAULT_FUEL
from .pretty import alpha_key, expr_lines, show_inline, show_scheme, show_type
from .program import Program, load_prelude, load_text
from .synth import OK, Candidate, SearchBudget, Tracer, synthesize_binding
from .typecheck import check_scheme

EXIT_OK = 0
EXIT_DIAGNOSTIC = 1
EXIT_EMPTY = 2

SIDECAR_SUFFIX = ".expected.json"
CSV_COLUMNS = ["goal", "mode", "wall_ms", "heads_examined", "candidates_emitted", "agreement"]


@dataclass(frozen=True)
class FillSettings:
    budget: SearchBudget = SearchBudget()
    fuel: int = DEFAULT_FUEL
    trace_synth: bool = False
    trace_types: bool = False
    trace_eval: bool = False
    prelude: Optional[str] = None
    no_prelude: bool = False


@dataclass
class GoalReport:
    name: str
    header: str
    scheme: str
    hole_type: str
    candidates: list
    wall_ms: float
    trace: str = ""

    def text(self) -> str:
        lines = [self.header]
        if not self.candidates:
            lines.append("> no candidates")
        for c in self.candidates:
            lines.extend(candidate_lines(c))
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "goal": self.name,
            "type": self.scheme,
            "holeType": self.hole_type,
            "candidates": [
                {"verdict": c.verdict, "expr": show_inline(c.body),
                 "lines": expr_lines(c.body), "perRow": list(c.per_row)}
                for c in self.candidates
            ],
            "timings": {"wall_ms": round(self.wall_ms, 3)},
        }


def marker(c: Candidate) -> str:
    return "(ok)" if c.verdict == OK else "(?)"


def candidate_lines(c: Candidate) -> list[str]:
    body = expr_lines(c.body)
    # continuation lines line up the same way after (ok) and (?)
    return [f"> {marker(c)} {body[0]}"] + [">     " + line for line in body[1:]]


# ---------------------------------------------------------------------------
# fill

def _prelude(settings: FillSettings) -> Program | bool:
    if settings.no_prelude:
        return False
    if settings.prelude is not None:
        return load_prelude(settings.prelude)
    return True


def load_file(path: str, settings: FillSettings) -> Program:
    text = Path(path).read_text(encoding="utf-8")
    return load_text(text, path, prelude=_prelude(settings))


def fill_goal(program: Program, index: int, settings: FillSettings) -> GoalReport:
    goal = program.goals[index]
    trace = io.StringIO()
    tracer = Tracer(lambda s: trace.write(f"[synth] {s}\n")) if settings.trace_synth else None
    eval_trace = (lambda s: trace.write(f"[eval] {s}\n")) if settings.trace_eval else None
    start = time.perf_counter()
    cands = synthesize_binding(program, goal, settings.budget, settings.fuel,
                               tracer=tracer, eval_trace=eval_trace)
    wall = (time.perf_counter() - start) * 1000
    if settings.trace_types:
        sink = lambda s: trace.write(f"[types] {s}\n")
        for c in cands:
            trace.write(f"[types] checking {show_inline(c.body)}\n")
            check_scheme(program.ctx.with_var(goal.name, goal.scheme), c.expr, goal.scheme, trace=sink)
    hole_t = goal.scheme.body
    for _ in goal.params:
        hole_t = hole_t.cod
    header = " ".join([goal.name, *goal.params, "=", "_", "::", show_type(hole_t)])
    return GoalReport(goal.name, header, show_scheme(goal.scheme), show_type(hole_t),
                      cands, wall, trace.getvalue())


def _fill_in_worker(path: str, index: int, settings: FillSettings) -> GoalReport:
    return fill_goal(load_file(path, settings), index, settings)


def run_fill(path: str, settings: FillSettings, as_json: bool = False,
             parallel_goals: bool = False, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        program = load_file(path, settings)
    except OSError as e:
        err.write(f"{path}: {e.strerror or e}\n")
        return EXIT_DIAGNOSTIC
    except Diagnostic as d:
        err.write(d.render() + "\n")
        return EXIT_DIAGNOSTIC

    n = len(program.goals)
    if parallel_goals and n > 1:
        # each worker reloads the file; results come back in file order
        with ProcessPoolExecutor() as pool:
            reports = list(pool.map(_fill_in_worker, [path] * n, range(n), [settings] * n))
    else:
        reports = [fill_goal(program, i, settings) for i in range(n)]

    for r in reports:
        if r.trace:
            err.write(r.trace)
    if as_json:
        doc = {"file": path, "goals": [r.to_json() for r in reports]}
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write("\n".join(r.text() for r in reports))
    if not reports:
        err.write(f"{path}: no holes to fill\n")
    return EXIT_OK if all(r.candidates for r in reports) else EXIT_EMPTY


# ---------------------------------------------------------------------------
# bench

def sidecar_path(syn: Path) -> Path:
    return syn.with_name(syn.stem + SIDECAR_SUFFIX)


def expected_keys(cands) -> list[dict]:
    """Sidecar form of a candidate list."""
    return [{"verdict": c.verdict, "expr": alpha_key(c.body)} for c in cands]


def _ok_set(cands) -> frozenset:
    return frozenset(alpha_key(c.body) for c in cands if c.verdict == OK)


def bench_goal(program: Program, goal, budget: SearchBudget, fuel: int,
               label: Optional[str] = None) -> tuple[list, list]:
    rows = []
    results = {}
    for mode, naive in (("constraint", False), ("naive", True)):
        stats: dict = {}
        start = time.perf_counter()
        cands = synthesize_binding(program, goal, budget, fuel, naive=naive, stats_out=stats)
        wall = (time.perf_counter() - start) * 1000
        results[mode] = cands
        rows.append({"goal": label or goal.name, "mode": mode, "wall_ms": f"{wall:.3f}",
                     "heads_examined": stats["heads_examined"],
                     "candidates_emitted": stats["candidates_emitted"]})
    agree = _ok_set(results["constraint"]) == _ok_set(results["naive"])
    for r in rows:
        r["agreement"] = str(agree).lower()
    return rows, results["constraint"]


def run_bench(directory: str, csv_path: Optional[str] = None, settings: FillSettings = FillSettings(),
              out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    root = Path(directory)
    if not root.is_dir():
        err.write(f"{directory}: not a directory\n")
        return EXIT_DIAGNOSTIC
    table = []
    for syn in sorted(root.glob("*.syn")):
        side = sidecar_path(syn)
        if not side.exists():
            err.write(f"warning: {syn}: no {side.name}, skipped\n")
            continue
        try:
            program = load_file(str(syn), settings)
        except Diagnostic as d:
            err.write(f"warning: {d.render()}, skipped\n")
            continue
        expected = json.loads(side.read_text(encoding="utf-8"))
        for goal in program.goals:
            rows, cands = bench_goal(program, goal, settings.budget, settings.fuel, label=f"{syn.stem}/{goal.name}")
            want = expected.get(goal.name)
            if want is not None and want != expected_keys(cands):
                err.write(f"warning: {syn}: {goal.name} differs from {side.name}\n")
            table.extend(rows)

    fh = open(csv_path, "w", newline="", encoding="utf-8") if csv_path else out
    try:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(table)
    finally:
        if csv_path:
            fh.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point

def _positive(s: str) -> int:
    n = int(s)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _natural(s: str) -> int:
    n = int(s)
    if n < 0:
        raise argparse.ArgumentTypeError("must not be negative")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="holeforge", description="Fill typed holes from types and examples.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--depth", type=_natural, default=3, help="application budget per term (default 3)")
        sp.add_argument("--case-depth", type=_natural, default=2, help="nested case limit (default 2)")
        sp.add_argument("--max-candidates", type=_positive, default=20, help="candidates per hole (default 20)")
        sp.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL, help="evaluation steps per example")
        sp.add_argument("--prelude", metavar="PATH", help="load this prelude instead of the built-in one")
        sp.add_argument("--no-prelude", action="store_true", help="load no prelude at all")

    f = sub.add_parser("fill", help="synthesize candidates for every hole in FILE")
    f.add_argument("file")
    common(f)
    f.add_argument("--json", action="store_true", help="print a JSON document instead of text")
    f.add_argument("--trace-synth", action="store_true", help="log applied synthesis rules to stderr")
    f.add_argument("--trace-types", action="store_true", help="log type checking of each candidate to stderr")
    f.add_argument("--trace-eval", action="store_true", help="log evaluation steps to stderr")
    f.add_argument("--seq", action="store_true", help="run the search sequentially (the default)")
    f.add_argument("--parallel-goals", action="store_true", help="synthesize goals in separate processes")

    b = sub.add_parser("bench", help="compare constraint-threaded and naive generation over a corpus")
    b.add_argument("dir")
    common(b)
    b.add_argument("--csv", metavar="PATH", help="write the CSV here instead of stdout")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    settings = FillSettings(
        budget=SearchBudget(args.depth, args.case_depth, args.max_candidates),
        fuel=args.fuel,
        trace_synth=getattr(args, "trace_synth", False),
        trace_types=getattr(args, "trace_types", False),
        trace_eval=getattr(args, "trace_eval", False),
        prelude=args.prelude,
        no_prelude=args.no_prelude,
    )
    try:
        if args.command == "fill":
            return run_fill(args.file, settings, as_json=args.json,
                            parallel_goals=args.parallel_goals and not args.seq)
        return run_bench(args.dir, args.csv, settings)
    except Diagnostic as d:  # a broken --prelude
        sys.stderr.write(d.render() + "\n")
        return EXIT_DIAGNOSTIC


if __name__ == "__main__":
    sys.exit(main())
