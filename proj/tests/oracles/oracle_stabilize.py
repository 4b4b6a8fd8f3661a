#!/usr/bin/env python3
"""Stabilization targets for the half-support multiplier (entries 1 below
[0,1/2), 0 elsewhere): with any frequency choice whose Gamma sets split
every dyadic tile of [0,1/2) and [1/2,1) evenly, the stabilized entries
d_I = (sum_{K in D_n, K below Gamma_I} d_K |K|) / |I| are exactly 1/2, and
the jump certificate |d_root - c| + 2 sum |d_I - d_parent| vanishes."""
from fractions import Fraction


def level(k):
    return k.bit_length() - 1


def measure(k):
    return Fraction(1, 1 << level(k))


def below(k, anc):
    return level(k) >= level(anc) and (k >> (level(k) - level(anc))) == anc


def tiles(n, gamma):
    return [k for k in range(1 << n, 2 << n) if any(below(k, g) for g in gamma)]


def in_left_half(k):
    return below(k, 2)


d = lambda k: Fraction(1) if in_left_half(k) else Fraction(0)

# frequencies n_I = level(I) + 1 with all-plus signs: Gamma_root = [0,1),
# Gamma_{I+-} = {r^Gamma_n = +-1}, which alternates left/right halves of
# each tile; every Gamma keeps half its measure on each side of 1/2
depth = 6
gammas = {1: [1]}
freq = {k: level(k) + 1 for k in range(1, 1 << depth)}
entries = {}
for k in sorted(gammas):
    n = freq[k]
    ts = tiles(n, gammas[k])
    entries[k] = sum(d(t) * measure(t) for t in ts) / measure(k)
    if 2 * k < (1 << depth):
        gammas[2 * k] = [2 * t for t in ts]
        gammas[2 * k + 1] = [2 * t + 1 for t in ts]

for k, v in entries.items():
    assert v == Fraction(1, 2), (k, v)
print("all stabilized entries are exactly 1/2 at depth", depth)

c = Fraction(1, 2)
cert = abs(entries[1] - c) + 2 * sum(
    abs(entries[k] - entries[k >> 1]) for k in entries if k > 1)
assert cert == 0
print("jump certificate |d_root - c| + 2 sum|d_I - d_parent| = 0")
print("OK")
