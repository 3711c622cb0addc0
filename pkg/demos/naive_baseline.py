"""
How much work does threading constraints save?
==============================================

Each goal is solved twice: by constraint-threaded generation and by a
baseline that enumerates every ground instance of every component. Both
must keep the same ok candidates; the head counts show the difference.
"""
import time
from pathlib import Path

from holeforge.program import load_text
from holeforge.synth import OK, synthesize_binding

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

print(f"{'goal':<22}{'mode':<12}{'heads':>12}{'ms':>10}  agree")
for name in ["fromMaybe", "map", "stutter", "append"]:
    program = load_text((CORPUS / f"{name}.syn").read_text())
    for goal in program.goals:
        oks = {}
        for mode, naive in (("constraint", False), ("naive", True)):
            stats = {}
            start = time.perf_counter()
            cands = synthesize_binding(program, goal, naive=naive, stats_out=stats)
            ms = (time.perf_counter() - start) * 1000
            oks[mode] = {repr(c.body) for c in cands if c.verdict == OK}
            print(f"{name + '/' + goal.name:<22}{mode:<12}{stats['heads_examined']:>12}{ms:>10.1f}",
                  end="" if naive else "\n")
        print(f"  {oks['constraint'] == oks['naive']}")
