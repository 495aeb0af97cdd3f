"""Realize derivations as plane instances by composing local planar gadgets.

Every sub-derivation of arity r becomes a *gadget*: a connected plane piece
whose outer face boundary is a list ``O`` of r darts with ``tail(O[j])`` the
vertex of coordinate ``r - j``.  The outer walk therefore reads v_r ... v_1.

Gadgets are combined with two primitives on a shared rotation system:

* ``split(F, a, b)`` draws a new edge across face F between the corners in
  front of ``F[a]`` and ``F[b]``;
* ``identify(c1, c2)`` glues two vertices together at the given corners,
  which merges two faces when the vertices lie in different pieces and
  pinches one face in two when they lie on the same face.

A corner is written ``(incoming, outgoing)``: the dart arriving at the vertex
along the face and the dart leaving it.  Opt nodes below the root cannot be
drawn as local gadgets; they become crisp leaf constraints whose relation is
certified by a separate realization of the Opt argument.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import Language, WeightedRelation, add_constant, opt
from .derivation import Derivation, evaluate
from .express import pi_v
from .plane import Constraint, PlaneGraph, PlaneInstance, validate_instance


class RealizationError(ValueError):
    pass


class _Builder:
    def __init__(self):
        self.dart_vertex: list[int] = []
        self.twin: list[int] = []
        self.rot: dict[int, list[int]] = {}
        self.constraints: list[list] = []  # [relation name, weight, anchor]
        self._next_vertex = 0

    def vertex(self) -> int:
        v = self._next_vertex
        self._next_vertex += 1
        self.rot[v] = []
        return v

    def edge(self, u: int, w: int) -> tuple[int, int]:
        """Two new darts ``p: u -> w`` and ``q: w -> u``, not yet placed in rotations."""
        p, q = len(self.dart_vertex), len(self.dart_vertex) + 1
        self.dart_vertex += [u, w]
        self.twin += [q, p]
        return p, q

    def tail(self, d: int) -> int:
        return self.dart_vertex[d]

    def insert_after(self, ref: int, d: int) -> None:
        r = self.rot[self.tail(ref)]
        r.insert(r.index(ref) + 1, d)

    def nxt(self, d: int) -> int:
        t = self.twin[d]
        r = self.rot[self.tail(t)]
        return r[r.index(t) - 1]

    def face(self, d: int) -> list[int]:
        out = [d]
        x = self.nxt(d)
        while x != d:
            out.append(x)
            x = self.nxt(x)
        return out

    def split(self, F: list[int], a: int, b: int) -> tuple[int, int]:
        """New edge across face F; returns ``(e, e2)`` with ``e: tail(F[b]) -> tail(F[a])``.

        Afterwards ``F[a..b-1] + [e]`` and ``F[b..a-1] + [e2]`` are faces
        (for ``a == b`` these are ``[e]`` and ``F + [e2]``).
        """
        e2, e = self.edge(self.tail(F[a]), self.tail(F[b]))
        self.insert_after(F[a], e2)
        self.insert_after(F[b], e)
        return e, e2

    def identify(self, host: tuple[int, int], guest: tuple[int, int]) -> None:
        in1, out1 = host
        in2, out2 = guest
        a, b = self.tail(out1), self.tail(out2)
        if a == b:
            raise RealizationError("corners already share a vertex")
        rb = self.rot.pop(b)
        k = rb.index(self.twin[in2])
        seq = rb[k:] + rb[:k]
        if seq[-1] != out2:
            raise RealizationError("guest corner is not a corner")
        for d in seq:
            self.dart_vertex[d] = a
        ra = self.rot[a]
        pos = ra.index(out1) + 1
        ra[pos:pos] = seq

    def constrain(self, name: str, anchor: int) -> int:
        self.constraints.append([name, Fraction(1), anchor])
        return len(self.constraints) - 1


@dataclass
class _Gadget:
    outer: list
    cons: list = field(default_factory=list)
    shift: Fraction = Fraction(0)

    @property
    def arity(self) -> int:
        return len(self.outer)


@dataclass
class Realization:
    """A plane instance whose pi_v, plus ``shift``, is the derived relation.

    With ``opt`` set the derived relation is Opt of that value.  Constraints
    named in ``residuals`` stand for Opt nodes; each maps to the realization
    of the Opt argument, which certifies the leaf table.
    """

    instance: PlaneInstance
    v: tuple
    shift: Fraction = Fraction(0)
    opt: bool = False
    residuals: dict = field(default_factory=dict)

    def relation(self, cap: int | None = None) -> WeightedRelation:
        kwargs = {} if cap is None else {"cap": cap}
        rel = pi_v(self.instance, self.v, **kwargs)
        if self.shift:
            rel = add_constant(rel, self.shift)
        return opt(rel) if self.opt else rel

    def verify(self) -> list[str]:
        """Problems found while re-checking the instance and all residual certificates."""
        problems = [f"{x.kind}: {x.detail}" for x in validate_instance(self.instance, for_expression=True).violations]
        if problems:
            return problems
        for name, sub in sorted(self.residuals.items()):
            leaf = self.instance.relations[name]
            sub_problems = sub.verify()
            problems += [f"{name}/{p}" for p in sub_problems]
            if not sub_problems and opt(sub.relation()) != leaf:
                problems.append(f"{name}: certificate does not reproduce the Opt leaf")
        return problems

    def count_instances(self) -> int:
        return 1 + sum(r.count_instances() for r in self.residuals.values())


def realize(d: Derivation, language: Language) -> Realization:
    """Build the plane instance for ``d``; a root Opt is recorded in the ``opt`` flag."""
    top_opt = d.kind == "Opt"
    body = d.children[0] if top_opt else d
    r = _Realizer(language)
    g = r.build(body)
    b = r.b
    alive = sorted(b.rot)
    index = {v: k for k, v in enumerate(alive)}
    graph = PlaneGraph(
        len(alive),
        tuple(index[v] for v in b.dart_vertex),
        tuple(b.twin),
        tuple(tuple(b.rot[v]) for v in alive),
    )
    constraints = tuple(Constraint(name, w, anchor) for name, w, anchor in b.constraints)
    inst = PlaneInstance(graph, language.domain_size, dict(r.relations), constraints, g.outer[0])
    v = tuple(index[b.tail(g.outer[len(g.outer) - i])] for i in range(1, g.arity + 1))
    return Realization(inst, v, g.shift, top_opt, r.residuals)


class _Realizer:
    def __init__(self, language: Language):
        self.language = language
        self.b = _Builder()
        self.relations: dict[str, WeightedRelation] = {}
        self.residuals: dict[str, Realization] = {}
        self._leaf_names: dict = {}
        self._memo: dict = {}

    # leaves

    def _relation_name(self, key, prefix: str, rel: WeightedRelation) -> str:
        if key not in self._leaf_names:
            name = prefix if prefix not in self.relations else f"{prefix}_{len(self._leaf_names)}"
            while name in self.relations:
                name += "_"
            self._leaf_names[key] = name
            self.relations[name] = rel
        return self._leaf_names[key]

    def _cycle(self, r: int, name: str | None) -> _Gadget:
        b = self.b
        if r == 1:
            u = b.vertex()
            f, g = b.edge(u, u)
            b.rot[u] = [f, g]
            cons = [b.constrain(name, f)] if name else []
            return _Gadget([g], cons)
        us = [b.vertex() for _ in range(r)]
        fs, gs = [], []
        for k in range(r):
            f, g = b.edge(us[k], us[(k + 1) % r])
            fs.append(f)
            gs.append(g)
        for k in range(r):
            b.rot[us[k]] = [fs[k], gs[k - 1]]
        cons = [b.constrain(name, fs[0])] if name else []
        outer = [gs[k] for k in range(r - 2, -1, -1)] + [gs[r - 1]]
        return _Gadget(outer, cons)

    def _leaf(self, rel: WeightedRelation, name: str) -> _Gadget:
        return self._cycle(rel.arity, name)

    # dispatcher

    def build(self, d: Derivation) -> _Gadget:
        k, p = d.kind, d.p
        if k == "Base":
            rel = self.language[p["name"]]
            name = self._relation_name(("base", p["name"]), p["name"], rel)
            return self._leaf(rel, name)
        if k == "Unary":
            rel = WeightedRelation(self.language.domain_size, 1, p["table"])
            return self._leaf(rel, self._relation_name(("unary", rel.table), "unary", rel))
        if k == "Zero":
            return self._cycle(p["arity"], None)
        if k == "Equality":
            return self._equality()
        if k == "Opt":
            return self._opt_leaf(d)
        if k in ("Feas", "Scale"):
            g = self.build(d.children[0])
            c = Fraction(0) if k == "Feas" else p["c"]
            for idx in g.cons:
                self.b.constraints[idx][1] *= c
            g.shift = g.shift * c
            return g
        if k == "AddConst":
            g = self.build(d.children[0])
            g.shift += p["c"]
            return g
        if k == "AddUnary":
            return self._add_unary(self.build(d.children[0]), self.build(d.children[1]), p["i"])
        if k == "RestrictDomain":
            return self._add_unary(self.build(d.children[0]), self.build(d.children[1]), p["i"])
        if k == "Pin":
            g = self._add_unary(self.build(d.children[0]), self.build(d.children[1]), p["i"])
            return self._minimise(g, p["i"])
        if k == "Minimise":
            return self._minimise(self.build(d.children[0]), p["i"])
        if k == "AddBinary":
            return self._add_binary(self.build(d.children[0]), self.build(d.children[1]), p["i"])
        if k == "EqRestrict":
            return self._add_binary(self.build(d.children[0]), self._equality(), p["i"])
        if k == "NeqRestrict":
            return self._add_binary(self.build(d.children[0]), self.build(d.children[1]), p["i"])
        if k == "Twist":
            return self._twist(self.build(d.children[0]), self.build(d.children[1]), p["i"])
        if k == "Join":
            return self._join(self.build(d.children[0]), self.build(d.children[1]), p["z1"], p["z2"])
        raise RealizationError(f"cannot realize node kind {k!r}")

    # gadgets

    def _equality(self) -> _Gadget:
        b = self.b
        x = b.vertex()
        a, a2 = b.edge(x, x)
        c, c2 = b.edge(x, x)
        b.rot[x] = [a, a2, c, c2]
        return _Gadget([a2, c2])

    def _opt_leaf(self, d: Derivation) -> _Gadget:
        rel = evaluate(d, self.language, self._memo)
        key = ("opt", d)
        fresh = key not in self._leaf_names
        name = self._relation_name(key, "opt", rel)
        if fresh:
            self.residuals[name] = realize(d.children[0], self.language)
        return self._leaf(rel, name)

    @staticmethod
    def _merge(g: _Gadget, h: _Gadget, outer: list) -> _Gadget:
        return _Gadget(outer, g.cons + h.cons, g.shift + h.shift)

    def _add_unary(self, g: _Gadget, u: _Gadget, i: int) -> _Gadget:
        b, O, r = self.b, g.outer, g.arity
        if u.arity != 1:
            raise RealizationError("AddUnary expects a unary second argument")
        _check_coord(r, i)
        u0 = u.outer[0]
        if r == 1:
            e, e2 = b.split(O, 0, 0)
            b.identify((O[0], e2), (u0, u0))
            return self._merge(g, u, [e])
        j = r - i
        a = (j - 1) % r
        e, e2 = b.split(O, a, j)
        b.identify((O[a], e), (u0, u0))
        return self._merge(g, u, [e2 if k == a else O[k] for k in range(r)])

    def _add_binary(self, g: _Gadget, h: _Gadget, i: int) -> _Gadget:
        b, O, r = self.b, g.outer, g.arity
        if r < 2:
            raise RealizationError("adding a binary relation needs arity at least 2")
        if h.arity != 2:
            raise RealizationError("AddBinary expects a binary second argument")
        _check_coord(r, i)
        h0, h1 = h.outer
        j = r - i
        a = (j - 1) % r
        e, e2 = b.split(O, a, j)
        b.identify((O[a], e), (h0, h1))
        if b.tail(O[a]) != b.tail(h0):
            b.identify((e, O[a]), (h1, h0))
        return self._merge(g, h, [e2 if k == a else O[k] for k in range(r)])

    def _minimise(self, g: _Gadget, i: int) -> _Gadget:
        b, O, r = self.b, g.outer, g.arity
        if r < 2:
            raise RealizationError("minimisation needs arity at least 2")
        _check_coord(r, i)
        j = r - i
        a = (j - 1) % r
        if r == 2:
            e, _ = b.split(O, a, a)
            return _Gadget([e], g.cons, g.shift)
        e, e2 = b.split(O, a, (j + 1) % r)
        return _Gadget([e2 if k == a else O[k] for k in range(r) if k != j], g.cons, g.shift)

    def _join(self, g1: _Gadget, g2: _Gadget, z1: int, z2: int) -> _Gadget:
        b = self.b
        if g1.arity != 2 or g2.arity != 2:
            raise RealizationError("join needs two binary arguments")
        O1, O2 = g1.outer, g2.outer
        p1, p2 = 2 - z1, 2 - z2
        b.identify((O1[p1 - 1], O1[p1]), (O2[p2 - 1], O2[p2]))
        F = [O1[p1], O1[p1 - 1], O2[p2], O2[p2 - 1]]
        _, e2 = b.split(F, 1, 3)
        G = [F[3], F[0], e2]
        f, _ = b.split(G, 2, 0)
        return self._merge(g1, g2, [f, e2])

    def _twist(self, g: _Gadget, n: _Gadget, i: int) -> _Gadget:
        b, O, r = self.b, g.outer, g.arity
        if self.language.domain_size != 2:
            raise RealizationError("twists need the Boolean domain")
        if n.arity != 2:
            raise RealizationError("twist helper must be binary")
        _check_coord(r, i)
        n0, n1 = n.outer
        if r == 1:
            b.identify((O[0], O[0]), (n0, n1))
            F = [O[0], n1, n0]
            e, _ = b.split(F, 2, 2)
            return self._merge(g, n, [e])
        j = r - i
        a = (j - 1) % r
        b.identify((O[a], O[j]), (n0, n1))
        rest = [O[(j + t) % r] for t in range(r - 1)]  # O[j], O[j+1], ..., O[j-2]
        F = [O[a], n1, n0] + rest
        _, e2 = b.split(F, 0, 2)
        G = [n0] + rest + [e2]
        _, f2 = b.split(G, 0, 2)
        outer = list(O)
        outer[a] = e2
        outer[j] = f2
        return self._merge(g, n, outer)


def _check_coord(r: int, i: int) -> None:
    if not 1 <= i <= r:
        raise RealizationError(f"coordinate {i} out of range for arity {r}")
