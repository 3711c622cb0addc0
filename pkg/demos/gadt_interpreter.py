"""
An interpreter for a typed expression language
==============================================

Exp a is a GADT: matching on Plus tells the checker that a is Int, and
matching on Eq that it is Bool. One example row for Lit is enough to
steer the search; the branch equalities do the rest.
"""
from holeforge.constraints import EMPTY
from holeforge.pretty import expr_lines, show_equality
from holeforge.program import load_text
from holeforge.synth import Scope, Synthesizer, Tracer, synthesize_binding
from holeforge.evaluate import Evaluator
from holeforge.syntax import TCon, TVar

SOURCE = """
plus :: Int -> Int -> Int
eqInt :: Int -> Int -> Bool
ite :: Bool -> a -> a -> a

{@
  eval :: Exp a -> a
  eval (Lit a1) = a1
@@
  recArg=0
  depth=4
  ctx=(plus, eqInt, ite)
@}
eval :: Exp a -> a
eval e = _
"""

program = load_text(SOURCE)
goal = program.goals[0]

# What does a single match on Plus add to the constraints?
tracer = Tracer()
engine = Synthesizer(program.ctx, [("plus", "var")], Evaluator(program.arities), tracer=tracer)
a = TVar("a")
engine.refine_match(EMPTY, Scope(locals=(("e", TCon("Exp", (a,))),)), "e", (a,), "Plus", a, [], 0, 0)
for rule, data in tracer.events:
    if rule == "refine-gadt-match":
        print("Plus brings", ", ".join(show_equality(eq) for eq in data["given"]))
print()

# The full search. Only Lit has an example, so the other branches are
# judged by type alone; the best-ranked one is printed.
cands = synthesize_binding(program, goal)
print(f"{len(cands)} candidates, first one:")
for line in expr_lines(cands[0].body):
    print("  " + line)
