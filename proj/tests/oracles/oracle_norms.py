#!/usr/bin/env python3
"""Hardy-space norm examples for h_root + h_left in both modes.

Constant mode reduces to the base norm of the synthesized step function;
independent mode averages |sum eps_I a_I h_I| over all sign patterns per
cell before taking the base norm.
"""
import itertools
import math
from fractions import Fraction


def haar(level, pos, grid_level):
    n = 1 << grid_level
    vals = [0] * n
    span = 1 << (grid_level - level)
    for t in range(pos * span, pos * span + span // 2):
        vals[t] = 1
    for t in range(pos * span + span // 2, (pos + 1) * span):
        vals[t] = -1
    return vals


def lp_norm(vals, p):
    s = sum(Fraction(abs(v)) ** p for v in vals) / len(vals)
    return s if p > 1 else s  # caller takes the root for p > 1


grid = 2
terms = [haar(0, 0, grid), haar(1, 0, grid)]
f = [sum(col) for col in zip(*terms)]
assert f == [2, 0, -1, -1]

l2sq = lp_norm(f, 2)
assert l2sq == Fraction(3, 2)
print("L2 constant norm^2 = 3/2, norm =", math.sqrt(3 / 2))

l1 = lp_norm(f, 1)
assert l1 == Fraction(1)
print("L1 constant norm = 1")

n = len(f)
avg = [Fraction(0)] * n
for signs in itertools.product((1, -1), repeat=len(terms)):
    g = [sum(s * t[c] for s, t in zip(signs, terms)) for c in range(n)]
    for c in range(n):
        avg[c] += Fraction(abs(g[c]), 2 ** len(terms))
assert avg == [Fraction(1)] * n
print("independent-mode inner average is 1 on every cell; L1 norm = 1")

# Khintchine lower constant: E|a eps1 + b eps2| >= (1/sqrt 2) sqrt(a^2+b^2)
worst = min(
    (abs(a + b) + abs(a - b)) / 2 / math.sqrt(a * a + b * b)
    for a in (x / 16 for x in range(-16, 17))
    for b in (x / 16 for x in range(-16, 17))
    if a or b
)
assert abs(worst - 1 / math.sqrt(2)) < 1e-12
print("two-term sign average over sqnorm bottoms out at 1/sqrt(2) =", worst)
print("OK")
