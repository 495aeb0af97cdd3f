"""Brute-force references shared by the unit and acceptance tests."""

import itertools
import random

from planarvcsp.core import INF, WeightedRelation


def crossing_holds(b: WeightedRelation, x2, y2) -> bool:
    """Strict crossing inequality for a binary b with both straight pairs feasible."""
    lhs = b.value(x2) + b.value(y2)
    return lhs is not INF and lhs < b.value((x2[0], y2[1])) + b.value((y2[0], x2[1]))


def reduce_to_pair(g: WeightedRelation, i: int, j: int, choice: dict, x, y) -> WeightedRelation:
    """Binary relation on coordinates (i, j) after each other coordinate k is
    pinned to x_k ("x"), pinned to y_k ("y"), or minimised over {x_k, y_k} ("min")."""
    d = g.domain_size
    others = [k for k in range(1, g.arity + 1) if k not in (i, j)]

    def val(a, b):
        options = []
        for k in others:
            c = choice[k]
            options.append([x[k - 1]] if c == "x" else [y[k - 1]] if c == "y" else sorted({x[k - 1], y[k - 1]}))
        best = INF
        for rest in itertools.product(*options):
            t = [None] * g.arity
            t[i - 1], t[j - 1] = a, b
            for k, v in zip(others, rest):
                t[k - 1] = v
            best = min(best, g.value(tuple(t)))
        return best
    return WeightedRelation.from_function(d, 2, val)


def swap_pairs_bruteforce(g: WeightedRelation, I, x, y) -> set:
    """All (i, j), i in I and j outside, for which some pin/minimise choice gives a crossing binary."""
    r = g.arity
    found = set()
    for i in sorted(I):
        for j in range(1, r + 1):
            if j in I:
                continue
            others = [k for k in range(1, r + 1) if k not in (i, j)]
            for picks in itertools.product(("x", "y", "min"), repeat=len(others)):
                b = reduce_to_pair(g, i, j, dict(zip(others, picks)), x, y)
                if crossing_holds(b, (x[i - 1], x[j - 1]), (y[i - 1], y[j - 1])):
                    found.add((i, j))
                    break
    return found


def random_swap_case(rng: random.Random, check):
    """A random (g, I, x, y) satisfying ``check(g, I, x, y)``."""
    while True:
        d = rng.choice((2, 2, 3))
        r = rng.choice((2, 3, 4)) if d == 2 else rng.choice((2, 3))
        g = WeightedRelation(d, r, tuple(rng.choice((0, 1, 2, INF)) for _ in range(d ** r)))
        fs = g.feasible_tuples()
        if len(fs) < 2:
            continue
        x, y = rng.choice(fs), rng.choice(fs)
        I = frozenset(rng.sample(range(1, r + 1), rng.randint(1, r - 1)))
        if check(g, I, x, y):
            return g, I, x, y
