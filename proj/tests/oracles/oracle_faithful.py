#!/usr/bin/env python3
"""Block-system examples: the level-1 root block, analysis recovery, and
the kappa value after dropping a child-block member."""
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


def inner(a, b):
    return sum(Fraction(x) * y for x, y in zip(a, b)) / len(a)


grid = 3

# B_root = {[0,1/2), [1/2,1)}, signs +1: the block function is r_1
hb = [a + b for a, b in zip(haar(1, 0, grid), haar(1, 1, grid))]
r1 = [1, 1, -1, -1, 1, 1, -1, -1]
assert hb == r1
print("root block over level 1 with plus signs gives r_1")

# synthesis sends h_root to the block function; analysis recovers it:
# coefficient at root = <block fn, block fn> / |B*| = 1
bstar = Fraction(1)
coef = inner(hb, hb) / bstar
assert coef == 1
print("analysis coefficient <h~, h~>/|B*| = 1 recovers h_root")

# cross coefficient against a disjoint deeper block vanishes
hc = haar(2, 0, grid)
assert inner(hb, hc) == 0
print("cross pairing with a deeper Haar function is 0")

# drop one member of a child block: B_I over level 1 (measure 1),
# child block B_I+ should cover {h~ = 1} at level 2 (measure 1/2);
# keeping only [0,1/4) leaves measure 1/4 = |B*_I|/4, so
# kappa_I = 2 |B*_child| / |B*_parent| = 1/2
parent_measure = Fraction(1)
child_measure = Fraction(1, 4)
kappa = 2 * child_measure / parent_measure
assert kappa == Fraction(1, 2)
print("dropping one level-2 member: kappa = 1/2 (valid, not faithful)")
print("OK")
