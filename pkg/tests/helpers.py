"""Shared test utilities: independent oracles and instance generators.

The brute-force oracles here enumerate with itertools over the domain
types, deliberately sharing no code with the package's kernels.
"""

from fractions import Fraction
from itertools import product

import numpy as np

from cuberec import (AttributeSpace, FitInstance, ItemVector, RatingScale,
                     UserModel, Variant)


def make_space(n, s=5):
    return AttributeSpace(tuple(f"a{j + 1}" for j in range(n)),
                          RatingScale.whole_stars(s))


def make_instance(bits_rows, deltas, s=5):
    n = len(bits_rows[0])
    items = tuple(ItemVector(f"i{k + 1}", tuple(row))
                  for k, row in enumerate(bits_rows))
    return FitInstance(make_space(n, s), items,
                       tuple(Fraction(d) for d in deltas))


def random_instance(rng, max_n=12, max_m=30, denom_choices=(1, 2, 3, 4)):
    n = int(rng.integers(1, max_n + 1))
    m = int(rng.integers(1, max_m + 1))
    rows = [tuple(int(b) for b in rng.integers(0, 2, n)) for _ in range(m)]
    deltas = []
    for _ in range(m):
        q = int(rng.choice(denom_choices))
        deltas.append(Fraction(int(rng.integers(0, n * q + 1)), q))
    return make_instance(rows, deltas)


def ham(a, b):
    return sum(x != y for x, y in zip(a, b))


def dprime(v, x):
    return sum((vi == 1 and xi == -1) or (vi == 0 and xi == 1)
               for vi, xi in zip(v, x))


def oracle_min(inst, variant):
    """Exhaustive optimum by direct enumeration: (objective, lex-min coords)."""
    n = inst.space.n
    alphabet = (0, 1) if variant is Variant.BINARY else (-1, 0, 1)
    dist = ham if variant is Variant.BINARY else dprime
    best = None
    best_x = None
    for coords in product(alphabet, repeat=n):
        obj = sum(abs(Fraction(dist(item.bits, coords)) - delta)
                  for item, delta in zip(inst.items, inst.dratings))
        if best is None or obj < best:
            best, best_x = obj, coords
    return best, best_x


def as_model(variant, coords):
    if variant is Variant.BINARY:
        return UserModel.binary(coords)
    return UserModel.ternary(coords)


def shuffled_instance(inst, rng):
    """Same instance with items (and aligned targets) in a new order."""
    order = rng.permutation(len(inst.items))
    return FitInstance(inst.space,
                       tuple(inst.items[i] for i in order),
                       tuple(inst.dratings[i] for i in order))
