"""Conservative languages: the pair graph, soft self-loops, and the STP/MJN pair.

Vertices of the pair graph are ordered pairs (a, b) of distinct labels.  A
binary relation g in the closure joins (a1, b1) and (a2, b2) when

    g(a1, b2) + g(b1, a2) < g(a1, a2) + g(b1, b2)

with a finite left side; the edge is soft if g(a1, a2) or g(b1, b2) is finite.
A soft self-loop certifies hardness.  Otherwise the loopless vertices are
2-coloured and the colouring defines a binary and a ternary candidate
multimorphism which are then checked directly against the language.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field, replace

from . import derivation as dv
from .closure import (Budget, SaturatedSet, crossing_values, crosses, normal_form, saturate,
                      swap_witness, check_swap_precondition, two_fan_opt)
from .core import (DEFAULT_MM_BUDGET, INF, BudgetExceeded, Language, MultimorphismCandidate, OpTable,
                   WeightedRelation, is_multimorphism)
from .derivation import Derivation
from . import express as ex

WR = WeightedRelation

TRACTABLE = "Tractable"
INTRACTABLE = "PlanarlyIntractable"
UNKNOWN = "Unknown"
EXIT_CODES = {TRACTABLE: 0, INTRACTABLE: 3, UNKNOWN: 6}


# --------------------------------------------------------------------------
# the pair graph


def bar(v: tuple) -> tuple:
    return (v[1], v[0])


@dataclass(frozen=True)
class EdgeWitness:
    u: tuple  # (a1, b1)
    v: tuple  # (a2, b2)
    kind: str  # "soft" or "hard"
    relation: WeightedRelation
    derivation: Derivation
    values: tuple  # (A, P, Q, B)

    def check(self) -> bool:
        (a1, b1), (a2, b2) = self.u, self.v
        if crossing_values(self.relation, a1, b1, a2, b2) != self.values:
            return False
        if not crosses(self.relation, a1, b1, a2, b2):
            return False
        A, _, _, B = self.values
        return (self.kind == "soft") == (A is not INF or B is not INF)


@dataclass
class PairGraph:
    domain_size: int
    vertices: tuple
    edges: dict = field(default_factory=dict)  # (u, v) with u <= v -> EdgeWitness
    truncated: bool = False

    def has_edge(self, u, v) -> bool:
        return _key(u, v) in self.edges

    def edge(self, u, v) -> EdgeWitness | None:
        return self.edges.get(_key(u, v))

    def loops(self) -> dict:
        return {u: w for (u, v), w in self.edges.items() if u == v}

    def neighbours(self, u) -> list:
        out = []
        for a, b in self.edges:
            if a == u:
                out.append(b)
            elif b == u:
                out.append(a)
        return sorted(set(out))

    def to_json(self) -> dict:
        return {
            "schema": "pair-graph",
            "domain_size": self.domain_size,
            "vertices": [list(v) for v in self.vertices],
            "edges": [
                {"u": list(u), "v": list(v), "kind": w.kind,
                 "values": [_fmt(x) for x in w.values], "derivation": w.derivation.to_json()}
                for (u, v), w in sorted(self.edges.items())
            ],
            "truncated": self.truncated,
        }

    def to_dot(self, bip: "Bipartition | None" = None) -> str:
        loops = self.loops()
        lines = ["graph pairs {"]
        for v in self.vertices:
            style = ' style=filled fillcolor="gray80"' if v in loops else ""
            group = ""
            if bip is not None:
                group = " M1" if v in bip.m1 else " M2" if v in bip.m2 else ""
            lines.append(f'  "{v[0]},{v[1]}" [label="({v[0]},{v[1]}){group}"{style}];')
        for (u, v), w in sorted(self.edges.items()):
            style = " [style=dashed]" if w.kind == "soft" else ""
            lines.append(f'  "{u[0]},{u[1]}" -- "{v[0]},{v[1]}"{style};')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _fmt(x):
    from .core import format_value
    return format_value(x)


def _key(u, v) -> tuple:
    return (u, v) if u <= v else (v, u)


def _record(G: PairGraph, g: WR, der: Derivation) -> None:
    d = G.domain_size
    pairs = [(a, b) for a in range(d) for b in range(d) if a != b]
    for (a1, b1), (a2, b2) in itertools.product(pairs, repeat=2):
        if not crosses(g, a1, b1, a2, b2):
            continue
        A, P, Q, B = vals = crossing_values(g, a1, b1, a2, b2)
        kind = "soft" if (A is not INF or B is not INF) else "hard"
        u, v = (a1, b1), (a2, b2)
        k = _key(u, v)
        old = G.edges.get(k)
        if old is None or (old.kind == "hard" and kind == "soft"):
            G.edges[k] = EdgeWitness(u, v, kind, g, der, vals)


def build_pair_graph(lang: Language, budget: Budget | None = None, S: SaturatedSet | None = None) -> PairGraph:
    """Pair graph from the binary members of the conservative saturation, plus
    binaries extracted from crossing violations of higher-arity relations."""
    S = S or saturate(lang, budget, conservative=True)
    d = lang.domain_size
    G = PairGraph(d, tuple((a, b) for a in range(d) for b in range(d) if a != b), truncated=S.exhausted)
    for e in S.sorted_entries():
        if e.relation.arity == 2:
            _record(G, e.relation, e.derivation)
    for name, g in lang.relations:
        if g.arity < 3 or g.arity > S.budget.max_arity:
            continue
        for w in _crossing_binaries(g, dv.base(name)):
            _record(G, w.relation, w.derivation)
    return G


def _crossing_binaries(g: WR, der: Derivation):
    """swap_witness outputs for every feasible x, y and partition (I contains coordinate 1)."""
    r = g.arity
    fs = g.feasible_tuples()
    seen = set()
    rest = list(range(2, r + 1))
    parts = [frozenset({1, *c}) for k in range(r - 1) for c in itertools.combinations(rest, k)]
    for x, y in itertools.product(fs, repeat=2):
        for I in parts:
            if not check_swap_precondition(g, I, x, y):
                continue
            w = swap_witness(g, I, x, y, der)
            key = normal_form(w.relation, True).relation
            if key in seen:
                continue
            seen.add(key)
            yield w


@dataclass(frozen=True)
class SoftLoop:
    vertex: tuple  # (a, b): the loop relation is {(a,a), (a,b), (b,a)}
    witness: EdgeWitness
    relation: WeightedRelation
    derivation: Derivation

    def verify(self, lang: Language) -> bool:
        a, b = self.vertex
        target = WR.crisp(lang.domain_size, 2, [(a, a), (a, b), (b, a)])
        return self.witness.check() and self.relation == target and dv.replays_to(self.derivation, lang, target)


def detect_soft_self_loop(G: PairGraph) -> SoftLoop | None:
    """First soft self-loop, with the crisp three-tuple relation it yields."""
    for v, w in sorted(G.loops().items()):
        if w.kind != "soft":
            continue
        a, b = v
        A, _, _, B = w.values
        # (a,a) finite: keep (a,a); otherwise (b,b) is finite and the shape sits at (b,a)
        mode, vertex = ("soft_a", (a, b)) if A is not INF else ("soft_b", (b, a))
        fan = two_fan_opt(w.relation, a, b, a, b, mode, w.derivation)
        return SoftLoop(vertex, w, fan.relation, fan.derivation)
    return None


# --------------------------------------------------------------------------
# bipartition


class BipartitionError(ValueError):
    pass


@dataclass(frozen=True)
class Bipartition:
    loops: frozenset  # vertices with a self-loop (the "barred" set)
    m1: frozenset
    m2: frozenset

    @property
    def m(self) -> frozenset:
        return self.m1 | self.m2

    def to_json(self) -> dict:
        return {
            "with_loop": [list(v) for v in sorted(self.loops)],
            "M1": [list(v) for v in sorted(self.m1)],
            "M2": [list(v) for v in sorted(self.m2)],
        }


def split_and_bipartition(G: PairGraph) -> Bipartition:
    loops = frozenset(G.loops())
    M = [v for v in G.vertices if v not in loops]
    for (u, v), w in G.edges.items():
        if (u in loops) != (v in loops):
            raise BipartitionError(f"edge {u}-{v} joins a looped and a loopless vertex")
        if u in loops and v in loops and w.kind == "soft":
            raise BipartitionError(f"soft edge {u}-{v} between looped vertices")
    colour = {}
    for seed in M:
        if seed in colour:
            continue
        colour[seed] = 1
        queue = deque([seed])
        while queue:
            u = queue.popleft()
            for v in G.neighbours(u):
                if v in loops:
                    continue
                if v not in colour:
                    colour[v] = 3 - colour[u]
                    queue.append(v)
                elif colour[v] == colour[u]:
                    raise BipartitionError(f"odd cycle through {u} and {v}")
    m1 = frozenset(v for v in M if colour[v] == 1)
    m2 = frozenset(v for v in M if colour[v] == 2)
    for v in M:
        if (v in m1) != (bar(v) in m2):
            raise BipartitionError(f"{v} and {bar(v)} are not on opposite sides")
    return Bipartition(loops, m1, m2)


# --------------------------------------------------------------------------
# candidates


def ab_c(a: int, b: int, c: int, S: SaturatedSet, loops) -> bool:
    """Whether some looped (s, t) has {(a,s), (b,s), (c,t)} in the closure."""
    if len({a, b, c}) < 3:
        return False
    d = S.language.domain_size
    return any(WR.crisp(d, 2, [(a, s), (b, s), (c, t)]) in S for s, t in sorted(loops))


def build_stp(bip: Bipartition, d: int) -> MultimorphismCandidate:
    def pair(x, y):
        if (x, y) in bip.m2:
            return y, x
        return x, y
    meet = OpTable.from_function(d, 2, lambda x, y: pair(x, y)[0], "stp_meet")
    join = OpTable.from_function(d, 2, lambda x, y: pair(x, y)[1], "stp_join")
    return MultimorphismCandidate((meet, join), "stp")


def mjn_triple(x, y, z, loops, abc) -> tuple:
    if (x == y and (y, z) in loops) or abc(x, y, z):
        return (x, y, z)
    if (z == x and (x, y) in loops) or abc(z, x, y):
        return (z, x, y)
    if (y == z and (z, x) in loops) or abc(y, z, x):
        return (y, z, x)
    return (x, y, z)


def mjn_conflicts(loops, abc, d: int) -> list[tuple]:
    """Triples on which two of the first three cases apply with different outputs."""
    out = []
    for x, y, z in itertools.product(range(d), repeat=3):
        hits = set()
        if (x == y and (y, z) in loops) or abc(x, y, z):
            hits.add((x, y, z))
        if (z == x and (x, y) in loops) or abc(z, x, y):
            hits.add((z, x, y))
        if (y == z and (z, x) in loops) or abc(y, z, x):
            hits.add((y, z, x))
        if len(hits) > 1:
            out.append((x, y, z))
    return out


def build_mjn(bip: Bipartition, abc, d: int) -> MultimorphismCandidate:
    """``abc(a, b, c)`` decides the ab|c relation (see :func:`ab_c`)."""
    table = {t: mjn_triple(*t, bip.loops, abc) for t in itertools.product(range(d), repeat=3)}
    ops = tuple(OpTable.from_function(d, 3, lambda x, y, z, k=k: table[x, y, z][k], name)
                for k, name in enumerate(("mj1", "mj2", "mn3")))
    return MultimorphismCandidate(ops, "mjn")


def stp_shape_problems(stp: MultimorphismCandidate, bip: Bipartition) -> list[str]:
    meet, join = stp.ops
    out = []
    for x, y in sorted(bip.m):
        if {meet(x, y), join(x, y)} != {x, y}:
            out.append(f"stp not conservative on {(x, y)}")
        if meet(x, y) != meet(y, x) or join(x, y) != join(y, x):
            out.append(f"stp not commutative on {(x, y)}")
    return out


def mjn_shape_problems(mjn: MultimorphismCandidate, bip: Bipartition) -> list[str]:
    out = []
    for a, b in sorted(bip.loops):
        for t in itertools.product((a, b), repeat=3):
            maj = a if t.count(a) >= 2 else b
            mino = a if t.count(a) % 2 == 1 else b
            got = tuple(op(*t) for op in mjn.ops)
            if got != (maj, maj, mino):
                out.append(f"mjn gives {got} on {t}")
    return out


def modularity_problems(lang: Language, bip: Bipartition) -> list[str]:
    """Crossing equalities expected on coordinates whose pairs carry loops."""
    out = []
    for name, g in lang.relations:
        fs = g.feasible_tuples()
        r = g.arity
        for x, y in itertools.product(fs, repeat=2):
            I = [i for i in range(1, r + 1) if (x[i - 1], y[i - 1]) in bip.loops]
            if not I or len(I) == r:
                continue
            u, w = ex.merge_parts(x, y, I), ex.merge_parts(y, x, I)
            if g.value(u) is INF or g.value(w) is INF:
                continue
            if g.value(x) + g.value(y) != g.value(u) + g.value(w):
                out.append(f"{name}: {x}, {y} on {I}")
    return out


# --------------------------------------------------------------------------
# the classifier


@dataclass
class ConservativeVerdict:
    verdict: str
    graph: PairGraph | None = None
    soft_loop: SoftLoop | None = None
    bipartition: Bipartition | None = None
    stp: MultimorphismCandidate | None = None
    mjn: MultimorphismCandidate | None = None
    stp_status: str | None = None
    mjn_status: str | None = None
    diagnostics: tuple = ()

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        if self.graph is not None:
            out["truncated"] = self.graph.truncated
            out["loops"] = [list(v) for v in sorted(self.graph.loops())]
        if self.soft_loop is not None:
            sl = self.soft_loop
            out["soft_loop"] = {
                "vertex": list(sl.vertex),
                "values": [_fmt(x) for x in sl.witness.values],
                "relation": sorted(list(t) for t in sl.relation.feasible_tuples()),
                "derivation": sl.derivation.to_json(),
            }
        if self.bipartition is not None:
            out["bipartition"] = self.bipartition.to_json()
        for key, cand in (("stp", self.stp), ("mjn", self.mjn)):
            if cand is not None:
                out[key] = {op.name: [_fmt_int(v) for v in op.table] for op in cand.ops}
        if self.stp_status:
            out["stp_status"] = self.stp_status
        if self.mjn_status:
            out["mjn_status"] = self.mjn_status
        if self.diagnostics:
            out["diagnostics"] = list(self.diagnostics)
        return out


def _fmt_int(v):
    return int(v)


def classify_conservative(lang: Language, budget: Budget | None = None,
                          mm_budget: int = DEFAULT_MM_BUDGET) -> ConservativeVerdict:
    budget = (budget or Budget()).resolve(lang)
    # a soft loop found at a shallow depth settles the question, so deepen gradually
    for depth in range(min(2, budget.max_depth), budget.max_depth + 1):
        b = replace(budget, max_depth=depth)
        S = saturate(lang, b, conservative=True)
        G = build_pair_graph(lang, b, S)
        loop = detect_soft_self_loop(G)
        if loop is not None or not S.exhausted:
            break
    if loop is not None:
        if loop.verify(lang):
            return ConservativeVerdict(INTRACTABLE, G, soft_loop=loop)
        return ConservativeVerdict(UNKNOWN, G, soft_loop=loop, diagnostics=("soft loop failed to replay",))
    try:
        bip = split_and_bipartition(G)
    except BipartitionError as exc:
        return ConservativeVerdict(UNKNOWN, G, diagnostics=(str(exc),))
    d = lang.domain_size
    stp = build_stp(bip, d)
    def abc(a, b, c):
        return ab_c(a, b, c, S, bip.loops)
    mjn = build_mjn(bip, abc, d)
    problems = stp_shape_problems(stp, bip) + mjn_shape_problems(mjn, bip)
    problems += [f"mjn cases disagree on {t}" for t in mjn_conflicts(bip.loops, abc, d)]
    try:
        sv = is_multimorphism(stp, lang, mm_budget)
        mv = is_multimorphism(mjn, lang, mm_budget)
    except BudgetExceeded as exc:
        return ConservativeVerdict(UNKNOWN, G, bipartition=bip, stp=stp, mjn=mjn, diagnostics=(str(exc),))
    if not sv.holds:
        problems.append(f"stp fails on {sv.relation} at {sv.witness}")
    if mv.status != "holds_with_equality":
        problems.append(f"mjn status {mv.status}" + (f" on {mv.relation} at {mv.witness}" if mv.witness else ""))
    verdict = UNKNOWN if problems else TRACTABLE
    return ConservativeVerdict(verdict, G, bipartition=bip, stp=stp, mjn=mjn, stp_status=sv.status,
                               mjn_status=mv.status, diagnostics=tuple(problems))
