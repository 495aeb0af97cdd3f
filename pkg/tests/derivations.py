"""Random derivation trees over a small Boolean language, for oracle tests."""

import random
from fractions import Fraction

from planarvcsp import derivation as dv
from planarvcsp.catalog import RHO_NEQ
from planarvcsp.core import INF, Language, WeightedRelation

VALUES = (Fraction(0), Fraction(1), Fraction(2), INF)


def random_relation(rng: random.Random, arity: int) -> WeightedRelation:
    table = [rng.choice(VALUES) for _ in range(2 ** arity)]
    if all(v is INF for v in table):
        table[0] = Fraction(0)
    return WeightedRelation(2, arity, tuple(table))


def random_language(rng: random.Random) -> Language:
    return Language(2, (
        ("g", random_relation(rng, rng.choice((1, 2, 2, 3, 3)))),
        ("h", random_relation(rng, 2)),
        ("neq", RHO_NEQ),
    ))


PIN_HELPER = {0: dv.unary((0, INF)), 1: dv.unary((INF, 0))}
NEQ = dv.base("neq")


def single_step(kind: str, child: dv.Derivation, r: int, rng: random.Random, lang: Language):
    """Apply one operation of the given kind to ``child`` (arity r); returns (derivation, arity) or None."""
    i = rng.randint(1, r)
    if kind == "AddUnary":
        return dv.add_unary(child, dv.unary([rng.choice(VALUES[:3]) for _ in range(2)]), i), r
    if kind == "AddBinary" and r >= 2:
        return dv.add_binary(child, dv.base("h"), i), r
    if kind == "Minimise" and r >= 2:
        return dv.minimise(child, i), r - 1
    if kind == "Pin" and r >= 2:
        a = rng.randint(0, 1)
        return dv.pin(child, a, i, PIN_HELPER[a]), r - 1
    if kind == "RestrictDomain":
        a = rng.randint(0, 1)
        return dv.restrict_domain(child, (a,), i, PIN_HELPER[a]), r
    if kind == "EqRestrict" and r >= 2:
        return dv.eq_restrict(child, i), r
    if kind == "NeqRestrict" and r >= 2:
        return dv.neq_restrict(child, i, NEQ), r
    if kind == "Twist":
        return dv.twist(child, i, NEQ), r
    if kind == "Join" and r == 2:
        return dv.join(child, dv.base("h"), rng.randint(1, 2), rng.randint(1, 2)), 2
    if kind == "Scale":
        return dv.Derivation("Scale", {"c": Fraction(rng.randint(0, 3), rng.randint(1, 2))}, (child,)), r
    if kind == "AddConst":
        return dv.Derivation("AddConst", {"c": Fraction(rng.randint(-2, 2))}, (child,)), r
    if kind == "Feas":
        return dv.feas_of(child), r
    if kind == "Opt":
        return dv.opt_of(child), r
    return None


KINDS = ("AddUnary", "AddBinary", "Minimise", "Pin", "RestrictDomain", "EqRestrict", "NeqRestrict",
         "Twist", "Join", "Scale", "AddConst", "Feas", "Opt")


def random_derivation(rng: random.Random, lang: Language, depth: int):
    r = lang["g"].arity
    d = dv.base("g")
    if rng.random() < 0.15:
        d, r = dv.equality(), 2
    for _ in range(depth):
        for _attempt in range(20):
            step = single_step(rng.choice(KINDS), d, r, rng, lang)
            if step is not None:
                d, r = step
                break
    return d
