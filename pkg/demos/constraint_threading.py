"""
Watching constraints flow through generation
============================================

Generation at goal [Bool] with map, isEven and a list of Int in scope.
Each rule application is printed as it happens.
"""
from holeforge.constraints import EMPTY
from holeforge.evaluate import Evaluator
from holeforge.parser import scheme_of
from holeforge.pretty import show_inline
from holeforge.program import default_prelude
from holeforge.synth import GenState, Scope, Synthesizer, Tracer

prelude = default_prelude()
ctx = prelude.ctx.with_vars([
    ("map", scheme_of("(a -> b) -> [a] -> [b]")),
    ("isEven", scheme_of("Int -> Bool")),
])
scope = Scope(locals=(("l", scheme_of("[Int]").body),))
goal = scheme_of("[Bool]").body

# the tracer records every rule; keep only the lines on the path to the answer
tracer = Tracer()
engine = Synthesizer(ctx, [("map", "var"), ("isEven", "var")], Evaluator(prelude.arities), tracer=tracer)
found = [e for e, _ in engine.generate(GenState(EMPTY, engine.supply, 2), scope, goal)]
print("terms:", ", ".join(show_inline(e) for e in found))
print()

# The function position is filled before its argument, so when map is
# chosen its type is unified with a still-unknown arrow. That equality is
# what later forces the first argument to be an Int -> Bool.
for line in tracer.lines:
    if line.startswith("gen-var: map") or line.startswith("gen-var: isEven") or line.startswith("gen-unify"):
        print(line)
