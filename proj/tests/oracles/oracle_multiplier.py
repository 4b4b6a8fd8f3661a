#!/usr/bin/env python3
"""Multiplier triple-norm, characteristic-sequence, and shift examples.

The triple norm is |d_root| + 2 * sum over represented non-root indices of
|d_I - d_parent|; the characteristic sequence is c_n = sum over level-n
intervals of d_K |K|.
"""
from fractions import Fraction


def iter_iota(depth):
    return range(1, 1 << depth)


def level(k):
    return k.bit_length() - 1


def triple_norm(d, depth):
    s = abs(d(1))
    for k in iter_iota(depth):
        if k > 1:
            s += 2 * abs(d(k) - d(k >> 1))
    return s


def charseq(d, depth):
    out = []
    for n in range(depth):
        out.append(sum(d(k) * Fraction(1, 1 << n)
                       for k in range(1 << n, 2 << n)))
    return out


def clusters(tail):
    reps = sorted(set(tail))
    return reps


def in_left_half(k):
    j = level(k)
    return j >= 1 and (k - (1 << j)) < (1 << (j - 1))


depth = 7

root_only = lambda k: Fraction(1) if k == 1 else Fraction(0)
assert triple_norm(root_only, depth) == 5
assert max(abs(root_only(k)) for k in iter_iota(depth)) == 1
print("root-only multiplier: triple norm 5, independent bound 1")

half = lambda k: Fraction(1) if in_left_half(k) else Fraction(0)
assert triple_norm(half, depth) == 2
print("half-support multiplier: triple norm 2")

cs = charseq(half, depth)
assert cs == [Fraction(0)] + [Fraction(1, 2)] * (depth - 1)
assert clusters(cs[1:]) == [Fraction(1, 2)]
print("half-support characteristic sequence:", [str(c) for c in cs],
      "clusters {1/2}")

alt = lambda k: Fraction((-1) ** level(k))
cs2 = charseq(alt, depth)
assert cs2 == [Fraction((-1) ** n) for n in range(depth)]
assert clusters(cs2) == [Fraction(-1), Fraction(1)]
print("alternating-by-level multiplier: clusters {-1, 1}")

# shift: W h_root = h_left; L1 constant-mode ratio
h_root_l1 = Fraction(1)
h_left_l1 = Fraction(1, 2)
assert h_left_l1 / h_root_l1 == Fraction(1, 2)
print("shift on h_root: L1 ratio 1/2")
print("OK")
