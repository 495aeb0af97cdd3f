"""Bounded saturation of a language's closure, with a derivation for every member.

The closure is generated by Feas, Opt, minimisation, binary join, pinning,
=/≠-restriction, Boolean twists and the addition of unary relations.  Members
are stored in a canonical affine form (minimum 0, smallest positive value 1)
since the closure is also closed under non-negative scaling and constant shifts.

Two constructive engines live here too: ``two_fan_opt`` turns a binary relation
with a strict crossing inequality into a crisp two- or three-tuple relation, and
``swap_witness`` shrinks an r-ary crossing violation down to a binary one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from . import derivation as dv
from . import express as ex
from .catalog import gamma_col, rho_eq, rho_subdomain
from .core import INF, Language, WeightedRelation, feas, opt
from .derivation import Derivation

WR = WeightedRelation


# --------------------------------------------------------------------------
# canonical affine form


@dataclass(frozen=True)
class CanonicalWRel:
    """``original = factor * relation + shift + sum_k potentials[k](x_k)``.

    ``potentials`` is empty unless unary terms were factored out (see
    :func:`normal_form`); each entry is a finite unary table.
    """

    relation: WeightedRelation
    shift: Fraction = Fraction(0)
    factor: Fraction = Fraction(1)
    potentials: tuple = ()

    def restore(self) -> WeightedRelation:
        rel = self.relation
        out = WR.trusted(rel.domain_size, rel.arity, tuple(
            INF if v is INF else self.factor * v + self.shift for v in rel.table))
        for k, pot in enumerate(self.potentials):
            out = ex.add_unary(out, WR.trusted(rel.domain_size, 1, pot), k + 1)
        return out


def canonical(rel: WeightedRelation) -> CanonicalWRel:
    """Shift the minimum finite entry to 0 and scale the smallest positive one to 1."""
    if rel.is_crisp:
        return CanonicalWRel(rel)
    m = second = None
    for v in rel.table:
        if v is INF:
            continue
        if m is None or v < m:
            m, second = v, m
        elif v != m and (second is None or v < second):
            second = v
    if m is None:
        return CanonicalWRel(rel)
    if second is None:
        # a single finite value: shifting gives the crisp support
        return CanonicalWRel(feas(rel), m, Fraction(1))
    p = second - m
    if m == 0 and p == 1:
        return CanonicalWRel(rel)
    table = tuple(INF if v is INF else (v - m) / p for v in rel.table)
    return CanonicalWRel(WR.trusted(rel.domain_size, rel.arity, table), m, p)


def _potentials(rel: WeightedRelation) -> tuple:
    """Finite unary tables whose removal fixes a canonical representative of
    ``rel`` modulo adding finite unaries (arity 1 and 2 only)."""
    d = rel.domain_size
    t = rel.table
    if rel.arity == 1:
        return (tuple(Fraction(0) if v is INF else v for v in t),)
    u = [None] * d
    w = [None] * d
    for root in range(d):
        if u[root] is not None:
            continue
        u[root] = Fraction(0)
        queue = [("r", root)]
        while queue:
            side, a = queue.pop(0)
            for b in range(d):
                if side == "r":
                    val = t[a * d + b]
                    if val is not INF and w[b] is None:
                        w[b] = val - u[a]
                        queue.append(("c", b))
                else:
                    val = t[b * d + a]
                    if val is not INF and u[b] is None:
                        u[b] = val - w[a]
                        queue.append(("r", b))
    w = [Fraction(0) if x is None else x for x in w]
    return tuple(u), tuple(w)


def normal_form(rel: WeightedRelation, modulo_unaries: bool = False) -> CanonicalWRel:
    """Canonical affine form, optionally after factoring out finite unary terms
    from unary and binary relations (used when all unaries are available)."""
    if not modulo_unaries or rel.arity > 2 or rel.is_crisp:
        return canonical(rel)
    pots = _potentials(rel)
    rep = rel
    for k, pot in enumerate(pots):
        rep = ex.add_unary(rep, WR.trusted(rel.domain_size, 1, tuple(-x for x in pot)), k + 1)
    c = canonical(rep)
    if all(x == 0 for pot in pots for x in pot):
        return c
    return CanonicalWRel(c.relation, c.shift, c.factor, pots)


def canonical_derivation(c: CanonicalWRel, d: Derivation) -> Derivation:
    """Wrap a derivation of the original relation so it evaluates to the canonical one."""
    for k, pot in enumerate(c.potentials):
        if any(x != 0 for x in pot):
            d = dv.add_unary(d, dv.unary(tuple(-x for x in pot)), k + 1)
    if c.factor == 1 and c.shift == 0:
        return d
    if c.relation.is_crisp and not c.relation.is_empty and c.factor == 1:
        return dv.feas_of(d)
    return dv.scaled(dv.shifted(d, -c.shift), 1 / c.factor)


def restore_derivation(c: CanonicalWRel, d: Derivation) -> Derivation:
    """Inverse of :func:`canonical_derivation`: from the canonical relation back to the original."""
    out = dv.shifted(dv.scaled(d, c.factor), c.shift)
    for k, pot in enumerate(c.potentials):
        if any(x != 0 for x in pot):
            out = dv.add_unary(out, dv.unary(pot), k + 1)
    return out


def is_canonical(rel: WeightedRelation) -> bool:
    return canonical(rel).relation == rel


def encode(rel: WeightedRelation) -> tuple:
    """Total order used for every deterministic iteration over relations."""
    return (rel.arity, tuple((1, 0) if v is INF else (0, v) for v in rel.table))


# --------------------------------------------------------------------------
# budgets and saturated sets


@dataclass(frozen=True)
class Budget:
    max_arity: int | None = None  # None: max(3, largest arity in the language)
    max_depth: int = 4
    max_set: int = 5000
    max_ops: int = 200_000  # generator applications over the whole run

    def __post_init__(self):
        for name in ("max_depth", "max_set", "max_ops"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.max_arity is not None and self.max_arity < 1:
            raise ValueError("max_arity must be positive")

    def resolve(self, language: Language) -> "Budget":
        if self.max_arity is not None:
            return self
        return Budget(max(3, language.max_arity), self.max_depth, self.max_set, self.max_ops)


@dataclass
class Entry:
    relation: WeightedRelation
    derivation: Derivation
    depth: int


@dataclass
class SaturatedSet:
    """Members keyed by normal form.  In conservative mode unary and binary
    members are stored modulo finite unary terms, since every unary relation is
    available there; :meth:`derivation` adds the terms back."""

    language: Language
    budget: Budget
    conservative: bool
    entries: dict = field(default_factory=dict)  # normal form -> Entry
    exhausted: bool = False
    ops: int = 0

    def normal(self, rel: WeightedRelation) -> CanonicalWRel:
        return normal_form(rel, self.conservative)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, rel: WeightedRelation) -> bool:
        return self.normal(rel).relation in self.entries

    def __iter__(self):
        return iter(self.sorted_entries())

    def sorted_entries(self) -> list[Entry]:
        return [self.entries[k] for k in sorted(self.entries, key=encode)]

    def relations(self, arity: int | None = None, crisp: bool | None = None) -> list[WeightedRelation]:
        out = []
        for e in self.sorted_entries():
            r = e.relation
            if arity is not None and r.arity != arity:
                continue
            if crisp is not None and r.is_crisp != crisp:
                continue
            out.append(r)
        return out

    def derivation(self, rel: WeightedRelation) -> Derivation | None:
        """Derivation evaluating exactly to ``rel``, or None when absent."""
        c = self.normal(rel)
        e = self.entries.get(c.relation)
        if e is None:
            return None
        return restore_derivation(c, e.derivation)

    def helper(self, subdomain) -> Derivation | None:
        return _helper(self.language.domain_size, subdomain, self.conservative, self)

    def to_json(self) -> dict:
        from .io import relation_to_json
        return {
            "schema": "saturated-set",
            "conservative": self.conservative,
            "exhausted": self.exhausted,
            "budget": {"max_arity": self.budget.max_arity, "max_depth": self.budget.max_depth,
                       "max_set": self.budget.max_set, "max_ops": self.budget.max_ops},
            "relations": [
                {"relation": relation_to_json(e.relation), "depth": e.depth, "derivation": e.derivation.to_json()}
                for e in self.sorted_entries()
            ],
        }


def _helper(d: int, subdomain, conservative: bool, S: SaturatedSet | None) -> Derivation | None:
    """Derivation of the crisp unary relation on ``subdomain``, if available."""
    target = rho_subdomain(d, subdomain)
    if conservative:
        return dv.unary_of(target)
    if S is not None and target in S.entries:
        return S.entries[target].derivation
    return None


def free_unaries(d: int) -> list[WeightedRelation]:
    """Canonical {0, 1, INF}-valued unaries, minus the all-zero and all-INF ones."""
    seen = {}
    for vals in itertools.product((0, 1, INF), repeat=d):
        rel = canonical(WR(d, 1, vals)).relation
        if rel.is_empty or all(v == 0 for v in rel.table):
            continue
        seen[rel] = True
    return sorted(seen, key=encode)


def saturate(language: Language, budget: Budget | None = None, conservative: bool = False) -> SaturatedSet:
    """Breadth-first closure of ``language`` up to the budget.

    Level 0 holds the language, equality and (conservative mode) the crisp
    unaries.  Each later level applies every generator to pairs involving at
    least one member of the previous level; candidates are deduplicated by
    normal form and, within a level, the smallest derivation wins (size, then
    serialisation).
    """
    budget = (budget or Budget()).resolve(language)
    d = language.domain_size
    S = SaturatedSet(language, budget, conservative)

    seeds = {}
    for name, rel in language.relations:
        _offer(S, seeds, rel, dv.base(name))
    _offer(S, seeds, rho_eq(d), dv.equality())
    if conservative:
        for u in free_unaries(d):
            if u.is_crisp:
                _offer(S, seeds, u, dv.unary_of(u))
    frontier = _insert(S, seeds, 0)

    pool = [(u, dv.unary_of(u)) for u in free_unaries(d)] if conservative else []
    depth = 0
    while frontier and not S.exhausted:
        if depth == budget.max_depth:
            # only need to know whether anything new is derivable
            S.exhausted = bool(_generate(S, frontier, pool, limit=0)[0])
            break
        cands, full = _generate(S, frontier, pool, limit=budget.max_set - len(S.entries))
        depth += 1
        frontier = _insert(S, cands, depth)
        S.exhausted = S.exhausted or full
    return S


class _Full(Exception):
    pass


def _offer(S: SaturatedSet, cands: dict, rel: WeightedRelation, d: Derivation) -> None:
    c = S.normal(rel)
    key = c.relation
    if key in S.entries:
        return
    der = canonical_derivation(c, d)
    old = cands.get(key)
    if old is None or der.order_key() < old.order_key():
        cands[key] = der


def _insert(S: SaturatedSet, cands: dict, depth: int) -> list[WeightedRelation]:
    added = []
    for rel in sorted(cands, key=encode):
        if rel in S.entries or rel.arity > S.budget.max_arity:
            continue
        if len(S.entries) >= S.budget.max_set:
            S.exhausted = True
            break
        S.entries[rel] = Entry(rel, cands[rel], depth)
        added.append(rel)
    return added


def _generate(S: SaturatedSet, frontier: list, pool: list, limit: int) -> tuple[dict, bool]:
    """Candidates for the next level; stops early (second value True) once
    more than ``limit`` distinct new relations have been seen."""
    cands: dict = {}
    try:
        _generate_into(S, frontier, pool, cands, limit)
    except _Full:
        return cands, True
    return cands, False


def _generate_into(S: SaturatedSet, frontier: list, pool: list, cands: dict, limit: int) -> None:
    d = S.language.domain_size
    ent = S.entries
    everything = sorted(ent, key=encode)
    neq = gamma_col(d)
    neq_d = ent[neq].derivation if d == 2 and neq in ent else None

    def offer(rel, der):
        S.ops += 1
        _offer(S, cands, rel, der)
        if len(cands) > limit or S.ops > S.budget.max_ops:
            raise _Full

    if S.conservative:
        unaries = pool
    else:
        unaries = [(u, ent[u].derivation) for u in everything if u.arity == 1]
    pins = {a: _helper(d, (a,), S.conservative, S) for a in range(d)}
    binaries = [g for g in everything if g.arity == 2]
    new = set(frontier)

    for g in frontier:
        gd = ent[g].derivation
        r = g.arity
        offer(feas(g), dv.feas_of(gd))
        offer(opt(g), dv.opt_of(gd))
        if r >= 2:
            for i in range(1, r + 1):
                offer(ex.minimise(g, i), dv.minimise(gd, i))
                for a, h in pins.items():
                    if h is not None:
                        offer(ex.pin(g, a, i), dv.pin(gd, a, i, h))
            for i in range(1, r if r == 2 else r + 1):
                offer(ex.eq_restrict(g, i), dv.eq_restrict(gd, i))
                if neq_d is not None:
                    offer(ex.neq_restrict(g, i), dv.neq_restrict(gd, i, neq_d))
        if neq_d is not None:
            for i in range(1, r + 1):
                offer(ex.twist(g, i), dv.twist(gd, i, neq_d))
        for u, ud in unaries:
            if S.conservative and r <= 2 and not u.is_crisp:
                continue  # absorbed by the normal form
            for i in range(1, r + 1):
                offer(ex.add_unary(g, u, i), dv.add_unary(gd, ud, i))
        if not S.conservative and r == 1:
            # a freshly derived unary may be added to anything already present
            for h in everything:
                if h in new:
                    continue
                hd = ent[h].derivation
                for i in range(1, h.arity + 1):
                    offer(ex.add_unary(h, g, i), dv.add_unary(hd, gd, i))
        if r == 2:
            offer(ex.transpose(g), dv.transpose(gd))
            # unordered pairs suffice: swapping the operands transposes the result
            for h in binaries:
                if h in new and encode(h) < encode(g):
                    continue
                hd = ent[h].derivation
                for z1 in (1, 2):
                    for z2 in (1, 2):
                        offer(ex.join(g, h, z1, z2), dv.join(gd, hd, z1, z2))
            if S.conservative:
                for a1, b1, a2, b2 in _pair_combos(d):
                    for mode in FAN_MODES:
                        fan = two_fan_opt(g, a1, b1, a2, b2, mode, gd)
                        if fan is not None:
                            offer(fan.relation, fan.derivation)


def _pair_combos(d: int):
    pairs = [(a, b) for a in range(d) for b in range(d) if a != b]
    for (a1, b1), (a2, b2) in itertools.product(pairs, repeat=2):
        yield a1, b1, a2, b2


# --------------------------------------------------------------------------
# membership


@dataclass(frozen=True)
class NotFound:
    """Membership query miss; ``exhausted`` tells whether the search was cut short."""

    exhausted: bool

    @property
    def complete(self) -> bool:
        return not self.exhausted

    def __bool__(self) -> bool:
        return False


def contains_crisp(S: SaturatedSet, rho: WeightedRelation):
    """Derivation of the crisp relation ``rho`` from ``S``, or :class:`NotFound`."""
    if not rho.is_crisp:
        raise ValueError("contains_crisp expects a crisp relation")
    if rho.arity > S.budget.max_arity:
        raise ValueError(f"arity {rho.arity} exceeds the saturation budget")
    e = S.entries.get(rho)
    if e is None:
        return NotFound(S.exhausted)
    return e.derivation


# --------------------------------------------------------------------------
# two-fan optimisation


FAN_MODES = ("hard", "soft_b", "soft_a")


@dataclass(frozen=True)
class FanResult:
    relation: WeightedRelation
    derivation: Derivation | None
    lam: Fraction
    values: tuple  # (A, P, Q, B)


def crossing_values(g: WeightedRelation, a1, b1, a2, b2) -> tuple:
    """``(A, P, Q, B) = (g(a1,a2), g(a1,b2), g(b1,a2), g(b1,b2))``."""
    return g(a1, a2), g(a1, b2), g(b1, a2), g(b1, b2)


def crosses(g: WeightedRelation, a1, b1, a2, b2) -> bool:
    """Strict inequality g(a1,b2) + g(b1,a2) < g(a1,a2) + g(b1,b2) with a finite left side."""
    A, P, Q, B = crossing_values(g, a1, b1, a2, b2)
    return P + Q is not INF and P + Q < A + B


def fan_lambda(A, P, Q, B, mode: str = "hard"):
    """Threshold for the unaries; the open interval is (P + Q - A, B)."""
    lo = None if A is INF else P + Q - A
    hi = None if B is INF else B
    if mode == "soft_b":
        return hi
    if mode == "soft_a":
        return lo
    if lo is not None and hi is not None:
        return (lo + hi) / 2
    if lo is not None:
        return lo + 1
    if hi is not None:
        return hi - 1
    return Fraction(0)


def two_fan_opt(g: WeightedRelation, a1: int, b1: int, a2: int, b2: int, mode: str = "hard",
                derivation: Derivation | None = None) -> FanResult | None:
    """Opt of g restricted to {a1,b1} x {a2,b2} plus threshold unaries.

    ``hard`` gives {(a1,b2), (b1,a2)}; ``soft_b`` adds (b1,b2) and ``soft_a``
    adds (a1,a2), each only when the corresponding entry is finite.  Returns
    None when the crossing inequality fails.
    """
    if g.arity != 2:
        raise ValueError("two_fan_opt needs a binary relation")
    if mode not in FAN_MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if a1 == b1 or a2 == b2:
        raise ValueError("pairs must have distinct labels")
    if not crosses(g, a1, b1, a2, b2):
        return None
    A, P, Q, B = crossing_values(g, a1, b1, a2, b2)
    lam = fan_lambda(A, P, Q, B, mode)
    if lam is None:
        return None
    d = g.domain_size
    u1 = WR(d, 1, tuple(lam - P if x == a1 else 0 if x == b1 else INF for x in range(d)))
    u2 = WR(d, 1, tuple(lam - Q if x == a2 else 0 if x == b2 else INF for x in range(d)))
    rel = opt(ex.add_unary(ex.add_unary(g, u1, 1), u2, 2))
    der = None
    if derivation is not None:
        der = dv.opt_of(dv.add_unary(dv.add_unary(derivation, dv.unary_of(u1), 1), dv.unary_of(u2), 2))
    return FanResult(rel, der, lam, (A, P, Q, B))


def fan_target(a1, b1, a2, b2, mode: str, d: int) -> WeightedRelation:
    tuples = [(a1, b2), (b1, a2)]
    if mode == "soft_b":
        tuples.append((b1, b2))
    elif mode == "soft_a":
        tuples.append((a1, a2))
    return WR.crisp(d, 2, tuples)


# --------------------------------------------------------------------------
# r-ary crossing violations down to binary ones


class SwapPreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class SwapWitness:
    i: int  # original coordinate in I
    j: int  # original coordinate in J
    relation: WeightedRelation  # binary, coordinates (i, j)
    derivation: Derivation | None
    steps: tuple = ()


def crossing_gap(g: WeightedRelation, I, x, y):
    """``(lhs, rhs)`` of g(x) + g(y) < g(x_I y_J) + g(y_I x_J)."""
    lhs = g.value(x) + g.value(y)
    rhs = g.value(ex.merge_parts(x, y, I)) + g.value(ex.merge_parts(y, x, I))
    return lhs, rhs


def check_swap_precondition(g: WeightedRelation, I, x, y) -> bool:
    I = set(I)
    r = g.arity
    if not I or not I < set(range(1, r + 1)):
        return False
    if g.value(x) is INF or g.value(y) is INF:
        return False
    lhs, rhs = crossing_gap(g, I, x, y)
    return lhs < rhs


def _unary_helpers(d: int) -> Callable:
    return lambda sub: dv.unary_of(rho_subdomain(d, sub))


def swap_witness(g: WeightedRelation, I: Iterable[int], x, y, derivation: Derivation | None = None,
                 helpers: Callable | None = None) -> SwapWitness:
    """Find i in I, j in J and a binary relation in the closure with
    g'(x_i,x_j) + g'(y_i,y_j) < g'(x_i,y_j) + g'(y_i,x_j).

    ``helpers(subdomain)`` supplies derivations of crisp unary relations used
    for pinning and domain restriction (free unary leaves by default).
    """
    I = frozenset(I)
    x, y = tuple(x), tuple(y)
    if not check_swap_precondition(g, I, x, y):
        raise SwapPreconditionError("x, y must be feasible and satisfy the strict crossing inequality")
    d = g.domain_size
    helpers = helpers or _unary_helpers(d)
    track = derivation is not None
    rel, der = g, derivation
    coords = list(range(1, g.arity + 1))
    steps = []

    def need(sub):
        h = helpers(tuple(sorted(set(sub))))
        if h is None:
            raise SwapPreconditionError(f"no derivation available for the unary relation on {sorted(set(sub))}")
        return h

    while rel.arity > 2:
        A = [p for p, c in enumerate(coords) if c in I]
        B = [p for p, c in enumerate(coords) if c not in I]
        if len(B) < 2:
            A, B = B, A  # the inequality is symmetric in the two parts
        k, Jp = B[-1], B[:-1]

        def mix(src_a, src_jp, src_k):
            t = list(src_a)
            for p in Jp:
                t[p] = src_jp[p]
            t[k] = src_k[k]
            return tuple(t)

        u = mix(x, y, x)
        w = mix(y, x, y)
        if rel.value(u) is INF and rel.value(w) is INF:
            sub = {x[k], y[k]}
            if len(sub) < d:
                rel = ex.restrict_domain(rel, sub, k + 1)
                der = dv.restrict_domain(der, sub, k + 1, need(sub)) if track else None
            rel = ex.minimise(rel, k + 1)
            der = dv.minimise(der, k + 1) if track else None
            steps.append(("restrict_minimise", coords[k]))
            drop = [k]
        else:
            if rel.value(w) is INF:
                x, y = y, x
                w = u
            lhs = rel.value(x) + rel.value(w)
            rhs = rel.value(mix(x, x, y)) + rel.value(mix(y, x, x))
            if lhs < rhs:
                for p in sorted(Jp, reverse=True):
                    rel = ex.pin(rel, x[p], p + 1)
                    der = dv.pin(der, x[p], p + 1, need({x[p]})) if track else None
                steps.append(("pin_rest", tuple(coords[p] for p in Jp)))
                y = mix(y, x, y)  # y_A x_J' y_k before dropping J'
                drop = list(Jp)
            else:
                rel = ex.pin(rel, y[k], k + 1)
                der = dv.pin(der, y[k], k + 1, need({y[k]})) if track else None
                steps.append(("pin_last", coords[k]))
                drop = [k]
        keep = [p for p in range(len(coords)) if p not in drop]
        x = tuple(x[p] for p in keep)
        y = tuple(y[p] for p in keep)
        coords = [coords[p] for p in keep]

    if coords[0] not in I:
        rel = ex.transpose(rel)
        der = dv.transpose(der) if track else None
        coords.reverse()
        x, y = x[::-1], y[::-1]
    i, j = coords
    if not _binary_crossing(rel, x, y):
        raise AssertionError("swap recursion lost the crossing inequality")  # pragma: no cover
    return SwapWitness(i, j, rel, der, tuple(steps))


def _binary_crossing(g: WeightedRelation, x, y) -> bool:
    a = g(x[0], x[1])
    b = g(y[0], y[1])
    if a is INF or b is INF:
        return False
    return a + b < g(x[0], y[1]) + g(y[0], x[1])


def swap_inequality_holds(w: SwapWitness, x, y) -> bool:
    """Check the output against the original tuples x and y."""
    return _binary_crossing(w.relation, (x[w.i - 1], x[w.j - 1]), (y[w.i - 1], y[w.j - 1]))
