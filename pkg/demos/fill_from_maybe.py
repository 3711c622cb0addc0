"""
Filling a hole with and without examples
========================================

The same signature is synthesized twice: once with two input-output rows,
once from the type alone.
"""
from holeforge.pretty import expr_lines
from holeforge.program import load_text
from holeforge.synth import synthesize_binding

WITH_EXAMPLES = """
{@
  fromMaybe :: a -> Maybe a -> a
  fromMaybe a1 Nothing = a1
  fromMaybe a1 (Just a2) = a2
@@
  ctx=(Just, Nothing)
@}
fromMaybe :: a -> Maybe a -> a
fromMaybe s1 m1 = _
"""

TYPE_ONLY = """
fromMaybe :: a -> Maybe a -> a
fromMaybe s1 m1 = _
"""


def show(title, text):
    program = load_text(text)
    goal = program.goals[0]
    print(f"-- {title}")
    for cand in synthesize_binding(program, goal):
        mark = "(ok)" if cand.verdict == "ok" else "(?)"
        first, *rest = expr_lines(cand.body)
        print(f"> {mark} {first}")
        for line in rest:
            print(f">     {line}")
    print()


# a1 and a2 are opaque constants of type a; the rows pin down which
# argument flows to the result in each constructor case
show("two examples", WITH_EXAMPLES)

# Without rows nothing is ruled out, but parametricity leaves very few
# well-typed programs, so the whole list fits on a screen. Each carries
# "(?)" because no example confirmed it.
show("type only", TYPE_ONLY)
