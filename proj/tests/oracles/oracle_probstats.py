#!/usr/bin/env python3
"""Brute-force conditional mean and variance of the randomized pairing
X_I(theta) = <r^Gamma_{n_I}, D r^Gamma_{n_I}> against the closed forms

  E X_child = 1/2 * sum_{K in D_{n_child}, K below Gamma_I} d_K |K|
  V X_child = sum_{J in D_{n_I}, J below Gamma_I}
              1/4 (sum_{K below J+} d_K|K| - sum_{K below J-} d_K|K|)^2

with the randomness running over the level-n_I signs inside Gamma_I.
Prints exact rationals for the instances frozen into the unit tests.
"""
import itertools
from fractions import Fraction


def level(k):
    return k.bit_length() - 1


def measure(k):
    return Fraction(1, 1 << level(k))


def below(k, anc):
    return level(k) >= level(anc) and (k >> (level(k) - level(anc))) == anc


def tiles(n, gamma):
    return [k for k in range(1 << n, 2 << n) if any(below(k, g) for g in gamma)]


def gamma_children(gamma_tiles, signs):
    plus = [2 * k + (0 if signs[k] > 0 else 1) for k in gamma_tiles]
    minus = [2 * k + (1 if signs[k] > 0 else 0) for k in gamma_tiles]
    return plus, minus


def pair_sum(d, n, gamma):
    return sum(d(k) * measure(k) for k in tiles(n, gamma))


def brute(d, n_parent, n_child, gamma, side):
    ts = tiles(n_parent, gamma)
    vals = []
    for pattern in itertools.product((1, -1), repeat=len(ts)):
        signs = dict(zip(ts, pattern))
        plus, minus = gamma_children(ts, signs)
        vals.append(pair_sum(d, n_child, plus if side > 0 else minus))
    mean = sum(vals) / len(vals)
    var = sum((v - mean) ** 2 for v in vals) / len(vals)
    return mean, var


def closed(d, n_parent, n_child, gamma):
    mean = pair_sum(d, n_child, gamma) / 2
    var = Fraction(0)
    for j in tiles(n_parent, gamma):
        diff = pair_sum(d, n_child, [2 * j]) - pair_sum(d, n_child, [2 * j + 1])
        var += Fraction(diff, 2) ** 2
    return mean, var


def check(name, d, n_parent, n_child, gamma):
    for side in (1, -1):
        bm, bv = brute(d, n_parent, n_child, gamma, side)
        cm, cv = closed(d, n_parent, n_child, gamma)
        assert bm == cm, (name, side, bm, cm)
        assert bv == cv, (name, side, bv, cv)
    print(f"{name}: mean {cm} variance {cv}")
    return cm, cv


identity = lambda k: Fraction(1)
alternating = lambda k: Fraction((-1) ** (k - (1 << level(k))))
left_child = lambda k: Fraction(1 if level(k) >= 1 and k % 2 == 0 else 0)

# identity multiplier, root turn: deterministic with mean |Gamma|/2
m, v = check("identity, root, n=(1,2)", identity, 1, 2, [1])
assert m == Fraction(1, 2) and v == 0

# alternating-by-position entries, root turn at frequencies (1,2): the
# half-sums differ by 1/2 per tile
m, v = check("alternating, root, n=(1,2)", alternating, 1, 2, [1])
assert m == 0 and v == Fraction(1, 8)

m, v = check("alternating, root, n=(1,3)", alternating, 1, 3, [1])
assert m == 0 and v == 0

# left-child indicator, root turn
m, v = check("left-child, root, n=(1,2)", left_child, 1, 2, [1])
assert m == Fraction(1, 4) and v == Fraction(1, 32)

# left-child indicator one turn deeper: Gamma = {r_1 = 1} under all-plus
# signs is [0,1/4) u [1/2,3/4)
gamma = [4, 6]
m, v = check("left-child, Gamma=[0,1/4)u[1/2,3/4), n=(2,3)", left_child, 2, 3,
             gamma)
assert m == Fraction(1, 8) and v == Fraction(1, 128)

# variance bound sup|d|^2 2^{-n} |Gamma| / 4 dominates in every instance
for name, d, npar, gamma in [
    ("identity", identity, 1, [1]),
    ("alternating", alternating, 1, [1]),
    ("left-child", left_child, 2, [4, 6]),
]:
    sup = Fraction(1)
    gm = sum(measure(g) for g in gamma)
    bound = sup ** 2 * Fraction(1, 1 << npar) * gm / 4
    _, bv = brute(d, npar, npar + 1, gamma, 1)
    assert bv <= bound, (name, bv, bound)
print("variance bound holds on all instances")
print("OK")
