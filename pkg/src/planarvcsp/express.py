"""Table semantics of the closure operations, pi_v evaluation and Opt-by-scaling.

Coordinates are 1-based throughout, matching the way relations are written
mathematically.  Adjacent-coordinate operations wrap around, so coordinate
``r`` is followed by coordinate 1.
"""

from __future__ import annotations

import itertools
from dataclasses import replace
from fractions import Fraction
from typing import Sequence

from .core import INF, BudgetExceeded, WeightedRelation, all_tuples, ext
from .plane import PlaneInstance, trace_faces, face_of

WR = WeightedRelation


def _coord(gamma: WeightedRelation, i: int) -> int:
    if not 1 <= i <= gamma.arity:
        raise ValueError(f"coordinate {i} out of range for arity {gamma.arity}")
    return i - 1


def _next(r: int, i: int) -> int:
    return i % r  # 0-based index of coordinate i+1 with wrap-around


# --------------------------------------------------------------------------
# Boolean tuple helpers


def zeros(r: int) -> tuple:
    return (0,) * r


def ones(r: int) -> tuple:
    return (1,) * r


def unit(r: int, i: int) -> tuple:
    """The r-tuple with a single one at coordinate i (1-based)."""
    if not 1 <= i <= r:
        raise ValueError("unit index out of range")
    return tuple(1 if k == i - 1 else 0 for k in range(r))


def xor(x: Sequence[int], y: Sequence[int]) -> tuple:
    if len(x) != len(y):
        raise ValueError("length mismatch")
    return tuple(a ^ b for a, b in zip(x, y))


def negate(x: Sequence[int]) -> tuple:
    return tuple(1 - a for a in x)


def merge_parts(x: Sequence[int], y: Sequence[int], I) -> tuple:
    """``x_I . y_J``: coordinates in I (1-based) from x, the rest from y."""
    I = set(I)
    return tuple(x[k] if k + 1 in I else y[k] for k in range(len(x)))


# --------------------------------------------------------------------------
# restrictions


def restrict_domain(gamma: WR, subdomain, i: int) -> WR:
    k = _coord(gamma, i)
    sub = set(subdomain)
    if any(not 0 <= a < gamma.domain_size for a in sub):
        raise ValueError("subdomain label out of range")
    return WR(gamma.domain_size, gamma.arity, tuple(v if t[k] in sub else INF for t, v in gamma.items()))


def _slices(gamma: WR, k: int):
    """For every index of the relation with coordinate k removed, the base
    index into ``gamma.table`` and the stride of coordinate k."""
    d, r = gamma.domain_size, gamma.arity
    stride = d ** (r - 1 - k)
    block = stride * d
    return [(o // stride) * block + o % stride for o in range(d ** (r - 1))], stride


def pin(gamma: WR, a: int, i: int) -> WR:
    k = _coord(gamma, i)
    if gamma.arity < 2:
        raise ValueError("pinning needs arity at least 2")
    if not 0 <= a < gamma.domain_size:
        raise ValueError(f"label {a} out of range")
    bases, stride = _slices(gamma, k)
    tab = gamma.table
    return WR.trusted(gamma.domain_size, gamma.arity - 1, tuple(tab[b + a * stride] for b in bases))


def eq_restrict(gamma: WR, i: int) -> WR:
    k = _coord(gamma, i)
    if gamma.arity < 2:
        raise ValueError("=-restriction needs arity at least 2")
    m = _next(gamma.arity, i)
    return WR(gamma.domain_size, gamma.arity, tuple(v if t[k] == t[m] else INF for t, v in gamma.items()))


def neq_restrict(gamma: WR, i: int) -> WR:
    k = _coord(gamma, i)
    if gamma.arity < 2:
        raise ValueError("!=-restriction needs arity at least 2")
    m = _next(gamma.arity, i)
    return WR(gamma.domain_size, gamma.arity, tuple(v if t[k] != t[m] else INF for t, v in gamma.items()))


def apply_restriction(gamma: WR, kind: str, i: int, arg=None) -> WR:
    """Dispatch on ``kind`` in {"domain", "pin", "eq", "neq"}."""
    if kind == "domain":
        return restrict_domain(gamma, arg, i)
    if kind == "pin":
        return pin(gamma, arg, i)
    if kind in ("eq", "eq_restrict"):
        return eq_restrict(gamma, i)
    if kind in ("neq", "neq_restrict"):
        return neq_restrict(gamma, i)
    raise ValueError(f"unknown restriction kind {kind!r}")


# --------------------------------------------------------------------------
# minimisation, join, twist, unary and binary addition


def minimise(gamma: WR, i: int) -> WR:
    k = _coord(gamma, i)
    if gamma.arity < 2:
        raise ValueError("minimisation needs arity at least 2")
    d = gamma.domain_size
    bases, stride = _slices(gamma, k)
    tab = gamma.table
    return WR.trusted(d, gamma.arity - 1, tuple(_min(tab[b + a * stride] for a in range(d)) for b in bases))


def _min(values):
    best = INF
    for v in values:
        if v is not INF and (best is INF or v < best):
            best = v
    return best


def _add(u, v):
    if u is INF or v is INF:
        return INF
    return u + v


def join(g1: WR, g2: WR, z1: int = 2, z2: int = 1) -> WR:
    """``g(x, y) = min_z g1(.) + g2(.)`` where z sits at coordinate z1 of g1 and z2 of g2.

    The defaults give the usual composition ``min_z g1(x, z) + g2(z, y)``.
    """
    if g1.arity != 2 or g2.arity != 2:
        raise ValueError("join needs two binary relations")
    if g1.domain_size != g2.domain_size:
        raise ValueError("domain mismatch")
    if z1 not in (1, 2) or z2 not in (1, 2):
        raise ValueError("z position must be 1 or 2")
    d = g1.domain_size
    t1, t2 = g1.table, g2.table
    # rows[x][z] = g1 value with the free coordinate at x and the shared one at z
    rows = [[t1[z * d + x] if z1 == 1 else t1[x * d + z] for z in range(d)] for x in range(d)]
    cols = [[t2[z * d + y] if z2 == 1 else t2[y * d + z] for z in range(d)] for y in range(d)]
    return WR.trusted(d, 2, tuple(
        _min(_add(rows[x][z], cols[y][z]) for z in range(d)) for x in range(d) for y in range(d)
    ))


def transpose(gamma: WR) -> WR:
    if gamma.arity != 2:
        raise ValueError("transpose needs a binary relation")
    d, t = gamma.domain_size, gamma.table
    return WR.trusted(d, 2, tuple(t[y * d + x] for x in range(d) for y in range(d)))


def twist(gamma: WR, i: int) -> WR:
    if gamma.domain_size != 2:
        raise ValueError("twists are defined on the Boolean domain only")
    e = unit(gamma.arity, i)
    return WR.from_function(2, gamma.arity, lambda *t: gamma.value(xor(t, e)))


def add_unary(gamma: WR, mu: WR, i: int) -> WR:
    k = _coord(gamma, i)
    if mu.arity != 1 or mu.domain_size != gamma.domain_size:
        raise ValueError("need a unary relation on the same domain")
    d, r = gamma.domain_size, gamma.arity
    stride = d ** (r - 1 - k)
    mt = mu.table
    return WR.trusted(d, r, tuple(_add(v, mt[(n // stride) % d]) for n, v in enumerate(gamma.table)))


def add_binary(gamma: WR, beta: WR, i: int) -> WR:
    """Add ``beta(x_i, x_{i+1})`` with wrap-around; needs arity at least 2."""
    k = _coord(gamma, i)
    if gamma.arity < 2:
        raise ValueError("adding a binary relation needs arity at least 2")
    if beta.arity != 2 or beta.domain_size != gamma.domain_size:
        raise ValueError("need a binary relation on the same domain")
    m = _next(gamma.arity, i)
    return WR(gamma.domain_size, gamma.arity, tuple(v + beta(t[k], t[m]) for t, v in gamma.items()))


# --------------------------------------------------------------------------
# pi_v


DEFAULT_FACTOR_CAP = 2 ** 20


def check_query(inst: PlaneInstance, v: Sequence[int]) -> None:
    """Raise ``ValueError`` unless the outer walk reads v_r ... v_1 from some dart."""
    faces = trace_faces(inst.graph)
    outer = inst.outer(faces)
    if outer is None:
        raise ValueError("instance has no outer face")
    target = tuple(reversed(tuple(v)))
    walk = outer.vertex_walk
    if len(walk) != len(target) or not any(walk[k:] + walk[:k] == target for k in range(len(walk))):
        raise ValueError(f"outer walk {walk} does not read v reversed {target}")
    for c in inst.constraints:
        if face_of(faces, c.anchor_dart).id == outer.id:
            raise ValueError("a constraint sits on the outer face")


def pi_v_bruteforce(inst: PlaneInstance, v: Sequence[int], cap: int = DEFAULT_FACTOR_CAP, check: bool = True) -> WR:
    """Reference pi_v by enumerating every assignment."""
    if check:
        check_query(inst, v)
    n, d = inst.graph.n, inst.domain_size
    if d ** n > cap:
        raise BudgetExceeded(f"{d}^{n} assignments exceed the cap {cap}")
    terms = inst.terms()
    best = {}
    for s in itertools.product(range(d), repeat=n):
        val = inst.objective(s, terms)
        key = tuple(s[u] for u in v)
        if key not in best or val < best[key]:
            best[key] = val
    return WR(d, len(v), tuple(best.get(t, INF) for t in all_tuples(d, len(v))))


def pi_v(inst: PlaneInstance, v: Sequence[int], cap: int = DEFAULT_FACTOR_CAP, check: bool = True) -> WR:
    """Exact pi_v by min-sum variable elimination over the constraint factors.

    Non-output variables are eliminated greedily (smallest resulting factor
    first, ties by vertex id), so the cost is exponential only in the width
    of the elimination order.  ``cap`` bounds the size of any factor table.
    """
    if check:
        check_query(inst, v)
    d = inst.domain_size
    factors = []
    for w, rel, scope in inst.terms():
        factors.append(_factor_from_term(w, rel, scope, d))
    keep = set(v)
    hidden = {u for f in factors for u in f[0]} - keep
    while hidden:
        def cost(u):
            joined = set()
            for sc, _ in factors:
                if u in sc:
                    joined |= set(sc)
            return (len(joined), u)

        u = min(hidden, key=cost)
        if d ** (cost(u)[0]) > cap:
            raise BudgetExceeded(f"elimination factor of size {d}^{cost(u)[0]} exceeds cap {cap}")
        touching = [f for f in factors if u in f[0]]
        factors = [f for f in factors if u not in f[0]]
        scope = tuple(sorted({x for sc, _ in touching for x in sc} - {u}))
        table = {}
        for t in itertools.product(range(d), repeat=len(scope)):
            asg = dict(zip(scope, t))
            best = INF
            for a in range(d):
                asg[u] = a
                total = Fraction(0)
                for sc, tab in touching:
                    total = total + tab[tuple(asg[x] for x in sc)]
                    if total is INF:
                        break
                if total < best:
                    best = total
            table[t] = best
        factors.append((scope, table))
        hidden.discard(u)
    out_vars = tuple(sorted(keep))
    if d ** len(out_vars) > cap:
        raise BudgetExceeded("output relation exceeds the cap")
    result = []
    for t in all_tuples(d, len(v)):
        asg = {}
        ok = True
        for u, a in zip(v, t):
            if asg.setdefault(u, a) != a:
                ok = False
                break
        if not ok:
            result.append(INF)
            continue
        total = Fraction(0)
        for sc, tab in factors:
            total = total + tab[tuple(asg[x] for x in sc)]
        result.append(total)
    return WR(d, len(v), tuple(result))


def _factor_from_term(w, rel: WR, scope, d):
    vars_ = tuple(sorted(set(scope)))
    table = {}
    for t in itertools.product(range(d), repeat=len(vars_)):
        asg = dict(zip(vars_, t))
        table[t] = w * rel.value(tuple(asg[x] for x in scope))
    return vars_, table


# --------------------------------------------------------------------------
# Opt by scaling


def opt_by_scaling(inst: PlaneInstance, index: int, gamma: WR) -> PlaneInstance:
    """Replace the constraint ``index`` (read as Opt(gamma)) by a scaled copy of gamma.

    The other constraints can change the objective by at most
    ``W = sum w_j (max_j - min_j)`` over feasible values, so with ``d`` the gap
    between the two smallest values of gamma the weight ``W/d + 1`` makes every
    non-optimal gamma-tuple cost more than any saving elsewhere.  When the
    instance using Opt(gamma) is feasible, both instances have the same
    optimal assignments.  A gamma with one finite value is used with weight 0.
    """
    if gamma.is_empty:
        raise ValueError("Opt of an all-INF relation has nothing to scale")
    values = gamma.finite_values()
    lo = values[0]
    normalized = WR(gamma.domain_size, gamma.arity, tuple(v if v is INF else v - lo for v in gamma.table))
    if len(values) == 1:
        weight = Fraction(0)
    else:
        gap = values[1] - lo
        W = Fraction(0)
        for j, c in enumerate(inst.constraints):
            if j == index:
                continue
            fin = inst.relations[c.relation].finite_values()
            if fin:
                W += c.weight * (fin[-1] - fin[0])
        weight = W / gap + 1
    name = _fresh_name(inst.relations, "scaled_" + inst.constraints[index].relation)
    relations = dict(inst.relations)
    relations[name] = normalized
    constraints = list(inst.constraints)
    constraints[index] = replace(constraints[index], relation=name, weight=weight)
    return PlaneInstance(inst.graph, inst.domain_size, relations, tuple(constraints), inst.outer_face)


def scaling_multiplier(gamma: WR, W) -> Fraction:
    values = gamma.finite_values()
    if len(values) < 2:
        return Fraction(0)
    return ext(W) / (values[1] - values[0]) + 1


def _fresh_name(existing, base: str) -> str:
    name, k = base, 1
    while name in existing:
        k += 1
        name = f"{base}_{k}"
    return name
