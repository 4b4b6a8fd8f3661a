#!/usr/bin/env python3
"""Haar analysis, signed Rademacher, and equimeasurability examples.

Functions are value lists over the dyadic grid at a chosen level.
"""
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


def integral(vals):
    return sum(Fraction(v) for v in vals) / len(vals)


def inner(a, b):
    return sum(Fraction(x) * y for x, y in zip(a, b)) / len(a)


grid = 2
f = [1, 1, 0, 0]  # chi_[0,1/2)

cnst = integral(f)
a_root = inner(f, haar(0, 0, grid)) / Fraction(1)
a_left = inner(f, haar(1, 0, grid)) / Fraction(1, 2)
assert cnst == Fraction(1, 2)
assert a_root == Fraction(1, 2)
assert a_left == 0
print("analysis of chi_[0,1/2): constant 1/2, root coefficient 1/2")

r1 = [a - b for a, b in zip(haar(1, 0, grid), haar(1, 1, grid))]
assert r1 == [1, -1, -1, 1]
print("signed level-1 Rademacher (+1, -1):", r1)


def dist_abs(vals):
    d = {}
    for v in vals:
        d[abs(v)] = d.get(abs(v), 0) + Fraction(1, len(vals))
    return d


d_root = dist_abs(haar(0, 0, grid))
d_left = dist_abs(haar(1, 0, grid))
assert d_root == {1: Fraction(1)}
assert d_left == {1: Fraction(1, 2), 0: Fraction(1, 2)}
assert d_root != d_left
print("equimeasurable(h_root, h_left) = False:", d_root, "vs", d_left)
print("OK")
