"""Boolean languages: the eight tractable multimorphisms, and hardness gadgets otherwise.

When none of the eight multimorphisms holds and the language is not closed
under complementation, the pipeline below builds derivations (and therefore
planar gadgets) of the constants, disequality and the 1-in-3 relation:

1. constants or disequality from violations of the constant multimorphisms;
2. disequality from the constants via min/max violations;
3. the constants from disequality via a complementation violation;
4. 1-in-3 from everything above via minority/majority violations.

Every step starts from a violating relation read off a failed check and
shrinks it with pinning, minimisation and =/≠-restriction followed by
minimisation, always keeping the violation.  Whenever no such reduction keeps
the violation the relation has the small shape each step needs, so the
result is then checked against that shape rather than trusted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import derivation as dv
from . import express as ex
from .catalog import (C0, C1, EIGHT, GAMMA_0, GAMMA_1, GAMMA_NEQ, MAX, MIN, MJRT, MNRT, NEGATION,
                      RHO_0, RHO_1, RHO_1IN3, RHO_NEQ, RHO_UP, mm)
from .closure import swap_witness
from .core import (DEFAULT_MM_BUDGET, INF, BudgetExceeded, Language, MultimorphismCandidate, OpTable,
                   Verdict, WeightedRelation, apply_componentwise, feas, is_multimorphism, is_polymorphism, opt)
from .derivation import Derivation

WR = WeightedRelation

TRACTABLE = "Tractable"
INTRACTABLE = "PlanarlyIntractable"
SELF_COMPLEMENTARY = "OpenSelfComplementary"
EXHAUSTED = "BudgetExhausted"

EXIT_CODES = {TRACTABLE: 0, INTRACTABLE: 3, SELF_COMPLEMENTARY: 4, EXHAUSTED: 5}

TARGETS = {"rho0": RHO_0, "rho1": RHO_1, "rho_neq": RHO_NEQ, "rho_1in3": RHO_1IN3}

MJ_MJ_MN = EIGHT[7]


class SynthesisError(RuntimeError):
    """A pipeline step could not produce its relation within the budget."""


@dataclass(frozen=True)
class BooleanBudget:
    mm_evaluations: int = DEFAULT_MM_BUDGET
    max_steps: int = 10_000


@dataclass(frozen=True)
class Derived:
    relation: WeightedRelation
    derivation: Derivation


@dataclass
class BooleanVerdict:
    verdict: str
    checks: tuple = ()  # (name, status) for the eight candidates
    holding: tuple = ()  # names of the candidates that hold
    derivations: dict = field(default_factory=dict)  # target name -> Derivation
    diagnostics: str = ""

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    @property
    def multimorphism(self) -> str | None:
        return self.holding[0] if self.holding else None

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "checks": [{"candidate": n, "status": s} for n, s in self.checks],
        }
        if self.holding:
            out["holding"] = list(self.holding)
            out["multimorphism"] = self.multimorphism
        if self.derivations:
            out["derivations"] = {k: d.to_json() for k, d in sorted(self.derivations.items())}
        if self.diagnostics:
            out["diagnostics"] = self.diagnostics
        return out


def _require_boolean(lang: Language) -> None:
    if lang.domain_size != 2:
        raise ValueError("Boolean classification needs domain size 2")


def check_eight(lang: Language, budget: int = DEFAULT_MM_BUDGET) -> list[tuple[str, Verdict]]:
    _require_boolean(lang)
    return [(m.name, is_multimorphism(m, lang, budget)) for m in EIGHT]


# --------------------------------------------------------------------------
# reductions


@dataclass
class _Tools:
    """Derivations of the helper relations available so far."""

    lang: Language
    budget: BooleanBudget
    rho: dict = field(default_factory=dict)  # "rho0" / "rho1" / "rho_neq" -> Derived
    steps: int = 0

    def pin_helper(self, a: int):
        got = self.rho.get(f"rho{a}")
        return got.derivation if got else None

    @property
    def neq(self):
        got = self.rho.get("rho_neq")
        return got.derivation if got else None

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget.max_steps:
            raise SynthesisError("reduction step budget exhausted")


def _reductions(cur: Derived, tools: _Tools, pins: bool, neq: bool):
    g, d = cur.relation, cur.derivation
    r = g.arity
    for i in range(1, r + 1):
        yield ex.minimise(g, i), dv.minimise(d, i)
    if pins:
        for i in range(1, r + 1):
            for a in (0, 1):
                h = tools.pin_helper(a)
                if h is not None:
                    yield ex.pin(g, a, i), dv.pin(d, a, i, h)
    for i in range(1, 2 if r == 2 else r + 1):
        yield ex.minimise(ex.eq_restrict(g, i), i), dv.minimise(dv.eq_restrict(d, i), i)
        if neq and tools.neq is not None:
            yield (ex.minimise(ex.neq_restrict(g, i), i),
                   dv.minimise(dv.neq_restrict(d, i, tools.neq), i))


def descend(start: Derived, violates: Callable[[WR], bool], tools: _Tools,
            pins: bool = True, neq: bool = True) -> Derived:
    """Greedily shrink ``start`` while ``violates`` stays true."""
    if not violates(start.relation):
        raise SynthesisError("starting relation does not violate the property")
    cur = start
    while cur.relation.arity > 1:
        for rel, der in _reductions(cur, tools, pins, neq):
            tools.tick()
            if violates(rel):
                cur = Derived(rel, der)
                break
        else:
            break
    return cur


def _fails(m: MultimorphismCandidate, budget: int) -> Callable[[WR], bool]:
    return lambda g: not is_multimorphism(m, g, budget).holds


def _not_invariant(f: OpTable, budget: int) -> Callable[[WR], bool]:
    return lambda g: not is_polymorphism(f, g, budget).holds


def _not_equality(m: MultimorphismCandidate, budget: int) -> Callable[[WR], bool]:
    return lambda g: is_multimorphism(m, g, budget).status != "holds_with_equality"


def _non_crisp(g: WR) -> bool:
    return len(g.finite_values()) >= 2


def _first(lang: Language, pred: Callable[[WR], bool]):
    for name, g in lang.relations:
        if pred(g):
            return name, g
    return None


def _base(lang: Language, pred, what: str) -> Derived:
    hit = _first(lang, pred)
    if hit is None:
        raise SynthesisError(f"no relation in the language {what}")
    name, g = hit
    return Derived(g, dv.base(name))


def _feas(x: Derived) -> Derived:
    return Derived(feas(x.relation), dv.feas_of(x.derivation))


def _opt(x: Derived) -> Derived:
    return Derived(opt(x.relation), dv.opt_of(x.derivation))


def _twist(x: Derived, i: int, tools: _Tools) -> Derived:
    return Derived(ex.twist(x.relation, i), dv.twist(x.derivation, i, tools.neq))


def _affine(x: Derived, factor, shift) -> Derived:
    """``factor * x + shift`` with factor >= 0."""
    rel = WR(2, x.relation.arity, tuple(INF if v is INF else factor * v + shift for v in x.relation.table))
    return Derived(rel, dv.shifted(dv.scaled(x.derivation, factor), shift))


def _add_unary(x: Derived, u: Derived, i: int) -> Derived:
    return Derived(ex.add_unary(x.relation, u.relation, i), dv.add_unary(x.derivation, u.derivation, i))


def _add_binary(x: Derived, b: Derived, i: int) -> Derived:
    return Derived(ex.add_binary(x.relation, b.relation, i), dv.add_binary(x.derivation, b.derivation, i))


def _expect(x: Derived, target: WR, what: str) -> Derived:
    if x.relation != target:
        raise SynthesisError(f"{what}: reached {x.relation!r}, expected {target!r}")
    return x


# --------------------------------------------------------------------------
# step 1: constants or disequality


def derive_constants(lang: Language, budget: BooleanBudget | None = None, tools: _Tools | None = None) -> dict:
    """Derivations of rho0 and rho1, or of disequality (possibly several of them).

    Needs the constant-0 and constant-1 multimorphisms to fail.
    """
    _require_boolean(lang)
    tools = tools or _Tools(lang, budget or BooleanBudget())
    mmb = tools.budget.mm_evaluations
    found = {}
    for const, other, cand in (("rho1", "rho0", mm(C0)), ("rho0", "rho1", mm(C1))):
        start = _opt(_base(lang, _fails(cand, mmb), f"violates <{cand.name}>"))
        end = descend(start, _fails(cand, mmb), tools, pins=False, neq=False)
        if end.relation.arity == 1:
            found.setdefault(const, _expect(end, TARGETS[const], const))
        elif end.relation == RHO_NEQ:
            found.setdefault("rho_neq", end)
        else:
            raise SynthesisError(f"constant step stopped at {end.relation!r}")
    return found


# --------------------------------------------------------------------------
# step 2: disequality from the constants


def _normalised_unary(u: Derived, low_at: int) -> Derived:
    """Scale and shift a unary with distinct finite values to gamma_0 (low_at=0) or gamma_1."""
    lo, hi = u.relation.table[low_at], u.relation.table[1 - low_at]
    if lo is INF or hi is INF or not lo < hi:
        raise SynthesisError(f"unary {u.relation!r} cannot be normalised")
    return _affine(u, 1 / (hi - lo), -lo / (hi - lo))


def _gamma_from_mm(lang: Language, tools: _Tools, cand: MultimorphismCandidate, low_at: int) -> Derived:
    mmb = tools.budget.mm_evaluations
    start = _base(lang, _fails(cand, mmb), f"violates <{cand.name}>")
    end = descend(start, _fails(cand, mmb), tools)
    if end.relation.arity != 1:
        raise SynthesisError(f"<{cand.name}> violation stopped at arity {end.relation.arity}")
    return _normalised_unary(end, low_at)


def _mu(c, g0: Derived, g1: Derived) -> Derived:
    """Unary with mu(0) = 0 and mu(1) = c."""
    if c >= 0:
        return _affine(g0, c, 0)
    return _affine(g1, -c, c)


def _neq_from_crossing(gp: Derived, g0: Derived, g1: Derived) -> Derived:
    """gamma_neq from a finite binary with g(0,1) + g(1,0) < g(0,0) + g(1,1)."""
    t = gp.relation
    if any(v is INF for v in t.table):
        raise SynthesisError(f"crossing relation {t!r} is not finite-valued")
    s = t(0, 0) + t(1, 1) - t(0, 1) - t(1, 0)
    if not s > 0:
        raise SynthesisError("crossing inequality does not hold")
    gn = _affine(gp, 2 / s, 1 - 2 * t(0, 0) / s)  # gn(0,0) = 1, crossing sum 2
    n = gn.relation
    out = _add_unary(_add_unary(gn, _mu(-n(1, 0), g0, g1), 1), _mu(-n(0, 1), g0, g1), 2)
    return _expect(out, GAMMA_NEQ, "gamma_neq")


def derive_neq(lang: Language, rho0: Derived, rho1: Derived, budget: BooleanBudget | None = None,
               tools: _Tools | None = None) -> Derived:
    """Disequality from the constants; needs the three min/max multimorphisms to fail."""
    _require_boolean(lang)
    tools = tools or _Tools(lang, budget or BooleanBudget())
    tools.rho.setdefault("rho0", rho0)
    tools.rho.setdefault("rho1", rho1)
    mmb = tools.budget.mm_evaluations
    min_pol = is_polymorphism(MIN, lang, mmb).holds
    max_pol = is_polymorphism(MAX, lang, mmb).holds

    def violator(f: OpTable, shape: set) -> Derived:
        start = _feas(_base(lang, _not_invariant(f, mmb), f"not invariant under {f.name}"))
        end = descend(start, _not_invariant(f, mmb), tools, neq=False)
        got = end.relation.support()
        if end.relation.arity != 2 or not {(0, 1), (1, 0)} <= got <= shape:
            raise SynthesisError(f"{f.name} violation stopped at {end.relation!r}")
        return end

    if not min_pol and not max_pol:
        vee = violator(MIN, {(0, 1), (1, 0), (1, 1)})
        up = violator(MAX, {(0, 1), (1, 0), (0, 0)})
        return _expect(_add_binary(vee, up, 1), RHO_NEQ, "rho_neq")
    if not min_pol:
        vee = violator(MIN, {(0, 1), (1, 0), (1, 1)})
        g0 = _gamma_from_mm(lang, tools, EIGHT[3], low_at=0)  # max-max
        return _expect(_opt(_add_unary(_add_unary(vee, g0, 1), g0, 2)), RHO_NEQ, "rho_neq")
    if not max_pol:
        up = violator(MAX, {(0, 1), (1, 0), (0, 0)})
        g1 = _gamma_from_mm(lang, tools, EIGHT[2], low_at=1)  # min-min
        return _expect(_opt(_add_unary(_add_unary(up, g1, 1), g1, 2)), RHO_NEQ, "rho_neq")

    g0 = _gamma_from_mm(lang, tools, EIGHT[3], low_at=0)
    g1 = _gamma_from_mm(lang, tools, EIGHT[2], low_at=1)
    cand = EIGHT[4]  # min-max
    end = descend(_base(lang, _fails(cand, mmb), "violates <min,max>"), _fails(cand, mmb), tools, neq=False)
    v = is_multimorphism(cand, end.relation, mmb)
    x, y = v.witness
    I = {k + 1 for k in range(len(x)) if x[k] == 0}
    w = swap_witness(end.relation, I, x, y, end.derivation, _pin_helpers(tools))
    gp = Derived(w.relation, w.derivation)  # x_i = 0, x_j = 1 on its two coordinates
    return _expect(_opt(_neq_from_crossing(gp, g0, g1)), RHO_NEQ, "rho_neq")


def _pin_helpers(tools: _Tools):
    def helper(sub):
        if len(sub) == 2:
            return None  # restricting to the whole domain is never requested
        return tools.pin_helper(sub[0])
    return helper


# --------------------------------------------------------------------------
# step 3: constants from disequality


def derive_consts_from_neq(lang: Language, neq: Derived, budget: BooleanBudget | None = None,
                           tools: _Tools | None = None) -> tuple[Derived, Derived]:
    """rho0 and rho1 from disequality; needs complementation to fail."""
    _require_boolean(lang)
    tools = tools or _Tools(lang, budget or BooleanBudget())
    tools.rho.setdefault("rho_neq", neq)
    mmb = tools.budget.mm_evaluations
    start = _base(lang, _fails(NEGATION, mmb), "violates <neg>")
    end = descend(start, _fails(NEGATION, mmb), tools, pins=False)
    if end.relation.arity != 1:
        raise SynthesisError(f"complementation violation stopped at arity {end.relation.arity}")
    one = _opt(end)
    other = _twist(one, 1, tools)
    if one.relation == RHO_0:
        return one, _expect(other, RHO_1, "rho1")
    return _expect(other, RHO_0, "rho0"), _expect(one, RHO_1, "rho1")


# --------------------------------------------------------------------------
# step 4: 1-in-3


def _gammas_from_noncrisp(lang: Language, tools: _Tools) -> tuple[Derived, Derived]:
    start = _base(lang, _non_crisp, "is non-crisp")
    end = descend(start, _non_crisp, tools)
    if end.relation.arity != 1:
        raise SynthesisError(f"non-crisp reduction stopped at arity {end.relation.arity}")
    u = end.relation
    if u(0) < u(1):
        g0 = _normalised_unary(end, 0)
        return g0, _expect(_twist(g0, 1, tools), GAMMA_1, "gamma1")
    g1 = _normalised_unary(end, 1)
    return _expect(_twist(g1, 1, tools), GAMMA_0, "gamma0"), g1


def _triangle(base: Derived, b: Derived) -> Derived:
    out = base
    for i in (1, 2, 3):
        out = _add_binary(out, b, i)
    return out


def _three_unaries(base: Derived, u: Derived) -> Derived:
    out = base
    for i in (1, 2, 3):
        out = _add_unary(out, u, i)
    return out


def _zero3() -> Derived:
    return Derived(WR.constant(2, 3, 0), dv.zero(3))


def _nonequality_witness(m: MultimorphismCandidate, g: WR):
    fs = g.feasible_tuples()
    for xs in itertools.product(fs, repeat=m.k):
        images = m.apply(xs)
        lhs = sum((g.value(im) for im in images), Fraction(0))
        rhs = sum((g.value(x) for x in xs), Fraction(0))
        if lhs != rhs:
            return xs
    return None


def derive_one_in_three(lang: Language, rho0: Derived, rho1: Derived, neq: Derived,
                        budget: BooleanBudget | None = None, tools: _Tools | None = None) -> Derived:
    """1-in-3 from the constants and disequality; needs the three
    minority/majority multimorphisms to fail."""
    _require_boolean(lang)
    tools = tools or _Tools(lang, budget or BooleanBudget())
    tools.rho.update({"rho0": tools.rho.get("rho0", rho0), "rho1": tools.rho.get("rho1", rho1),
                      "rho_neq": tools.rho.get("rho_neq", neq)})
    mmb = tools.budget.mm_evaluations
    mn_pol = is_polymorphism(MNRT, lang, mmb).holds
    mj_pol = is_polymorphism(MJRT, lang, mmb).holds

    def rho_up() -> Derived:
        start = _feas(_base(lang, _not_invariant(MNRT, mmb), "not invariant under mnrt"))
        end = descend(start, _not_invariant(MNRT, mmb), tools)
        if end.relation.arity != 2 or len(end.relation.support()) != 3:
            raise SynthesisError(f"mnrt violation stopped at {end.relation!r}")
        (a, b), = set(itertools.product((0, 1), repeat=2)) - end.relation.support()
        if a == 0:
            end = _twist(end, 1, tools)
        if b == 0:
            end = _twist(end, 2, tools)
        return _expect(end, RHO_UP, "rho_up")

    def rho_prime() -> Derived:
        start = _feas(_base(lang, _not_invariant(MJRT, mmb), "not invariant under mjrt"))
        end = descend(start, _not_invariant(MJRT, mmb), tools)
        if end.relation.arity != 3:
            raise SynthesisError(f"mjrt violation stopped at arity {end.relation.arity}")
        xs = is_polymorphism(MJRT, end.relation, mmb).witness
        w = apply_componentwise(MJRT, xs)
        for i in (1, 2, 3):
            if w[i - 1] == 1:
                end = _twist(end, i, tools)
        sup = end.relation.support()
        if (0, 0, 0) in sup or not {(1, 0, 0), (0, 1, 0), (0, 0, 1)} <= sup:
            raise SynthesisError(f"twisted mjrt violation has unexpected support {sorted(sup)}")
        return end

    if not mn_pol and not mj_pol:
        out = _triangle(rho_prime(), rho_up())
        return _expect(out, RHO_1IN3, "rho_1in3")
    g0, g1 = _gammas_from_noncrisp(lang, tools)
    if not mn_pol:
        return _expect(_opt(_three_unaries(_triangle(_zero3(), rho_up()), g1)), RHO_1IN3, "rho_1in3")
    if not mj_pol:
        return _expect(_opt(_three_unaries(rho_prime(), g0)), RHO_1IN3, "rho_1in3")

    # both are polymorphisms: shrink a relation where <mjrt,mjrt,mnrt> is strict
    end = descend(_base(lang, _not_equality(MJ_MJ_MN, mmb), "breaks equality for <mjrt,mjrt,mnrt>"),
                  _not_equality(MJ_MJ_MN, mmb), tools)
    xs = _nonequality_witness(MJ_MJ_MN, end.relation)
    w = apply_componentwise(MJRT, xs)
    for i in range(1, end.relation.arity + 1):
        if w[i - 1] == 1:
            end = _twist(end, i, tools)
    xs = tuple(ex.xor(x, w) for x in xs)
    r = end.relation.arity
    z = next((x for x in xs if any(x)), None)
    if z is None:
        raise SynthesisError("no non-zero tuple in the equality violation")
    g = end.relation
    nz = ex.negate(z)
    I = {k + 1 for k in range(r) if z[k] == 0}
    if g.value(z) + g.value(nz) < g.value(ex.zeros(r)) + g.value(ex.ones(r)):
        sw = swap_witness(g, I, z, nz, end.derivation, _pin_helpers(tools))
        gp = Derived(sw.relation, sw.derivation)
    else:
        sw = swap_witness(g, I, ex.zeros(r), ex.ones(r), end.derivation, _pin_helpers(tools))
        gp = _twist(Derived(sw.relation, sw.derivation), 1, tools)
    gneq = _neq_from_crossing(gp, g0, g1)
    return _expect(_opt(_three_unaries(_triangle(_zero3(), gneq), g0)), RHO_1IN3, "rho_1in3")


# --------------------------------------------------------------------------
# the classifier


def synthesize(lang: Language, budget: BooleanBudget | None = None) -> dict:
    """Run the gadget pipeline; returns target name -> Derivation."""
    _require_boolean(lang)
    tools = _Tools(lang, budget or BooleanBudget())
    first = derive_constants(lang, tools=tools)
    tools.rho.update(first)
    if "rho0" in first and "rho1" in first:
        tools.rho.setdefault("rho_neq", derive_neq(lang, first["rho0"], first["rho1"], tools=tools))
    else:
        if "rho_neq" not in first:
            raise SynthesisError("constant step produced a single constant only")
        r0, r1 = derive_consts_from_neq(lang, first["rho_neq"], tools=tools)
        tools.rho.setdefault("rho0", r0)
        tools.rho.setdefault("rho1", r1)
    r = tools.rho
    r["rho_1in3"] = derive_one_in_three(lang, r["rho0"], r["rho1"], r["rho_neq"], tools=tools)
    return {k: r[k].derivation for k in TARGETS}


def verify_derivations(lang: Language, derivations: dict) -> list[str]:
    """Replay every derivation without free unary leaves; returns problems."""
    problems = []
    for name, target in TARGETS.items():
        d = derivations.get(name)
        if d is None:
            problems.append(f"{name}: missing")
            continue
        try:
            got = dv.replay(d, lang, allow_unary=False)
        except dv.DerivationError as exc:
            problems.append(f"{name}: {exc}")
            continue
        if got != target:
            problems.append(f"{name}: replays to {got!r}")
    return problems


def classify_boolean(lang: Language, budget: BooleanBudget | None = None) -> BooleanVerdict:
    _require_boolean(lang)
    budget = budget or BooleanBudget()
    try:
        checks = check_eight(lang, budget.mm_evaluations)
    except BudgetExceeded as exc:
        return BooleanVerdict(EXHAUSTED, diagnostics=str(exc))
    table = tuple((n, v.status) for n, v in checks)
    holding = tuple(n for n, v in checks if v.holds)
    if holding:
        return BooleanVerdict(TRACTABLE, table, holding)
    try:
        if is_multimorphism(NEGATION, lang, budget.mm_evaluations).holds:
            return BooleanVerdict(SELF_COMPLEMENTARY, table)
        ders = synthesize(lang, budget)
    except (SynthesisError, BudgetExceeded) as exc:
        return BooleanVerdict(EXHAUSTED, table, diagnostics=str(exc))
    problems = verify_derivations(lang, ders)
    if problems:
        return BooleanVerdict(EXHAUSTED, table, diagnostics="; ".join(problems))
    return BooleanVerdict(INTRACTABLE, table, derivations=ders)
