"""Rotation-system plane multigraphs, face tracing and plane VCSP instances.

Darts are integers. Dart ``d`` leaves vertex ``dart_vertex[d]``; ``twin[d]`` is
the opposite dart of the same edge (for a self-loop both darts leave the same
vertex).  ``rotations[v]`` lists the darts at ``v`` in clockwise order.

Faces are traced with ``next(d) = pred_{head(d)}(twin(d))`` where ``pred`` is
the cyclic predecessor in the clockwise rotation.  This walks every face
clockwise around its interior, so a bounded face reads like the constraint
scope it hosts, and the outer face reads its vertices in reverse.
A face is identified by the smallest dart on its boundary.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import INF, BudgetExceeded, WeightedRelation, ext


class PlaneGraphError(ValueError):
    pass


@dataclass(frozen=True)
class PlaneGraph:
    n: int
    dart_vertex: tuple
    twin: tuple
    rotations: tuple

    def __post_init__(self):
        object.__setattr__(self, "dart_vertex", tuple(self.dart_vertex))
        object.__setattr__(self, "twin", tuple(self.twin))
        object.__setattr__(self, "rotations", tuple(tuple(r) for r in self.rotations))
        self._check_structure()

    @classmethod
    def from_edges(cls, n: int, dart_vertex: Sequence[int], edges: Sequence[Sequence[int]], rotations) -> "PlaneGraph":
        twin = [-1] * len(dart_vertex)
        for e in edges:
            if len(e) != 2:
                raise PlaneGraphError(f"edge {e!r} must have exactly two darts")
            a, b = e
            for d in (a, b):
                if not 0 <= d < len(dart_vertex):
                    raise PlaneGraphError(f"edge {e!r} refers to unknown dart {d}")
                if twin[d] != -1:
                    raise PlaneGraphError(f"dart {d} belongs to two edges")
            if a == b:
                raise PlaneGraphError("an edge needs two distinct darts")
            twin[a], twin[b] = b, a
        for d, t in enumerate(twin):
            if t == -1:
                raise PlaneGraphError(f"dangling dart {d}")
        return cls(n, tuple(dart_vertex), tuple(twin), tuple(tuple(r) for r in rotations))

    def _check_structure(self) -> None:
        nd = len(self.dart_vertex)
        if len(self.twin) != nd:
            raise PlaneGraphError("twin table has the wrong length")
        if len(self.rotations) != self.n:
            raise PlaneGraphError("need one rotation per vertex")
        for d, v in enumerate(self.dart_vertex):
            if not 0 <= v < self.n:
                raise PlaneGraphError(f"dart {d} at unknown vertex {v}")
            t = self.twin[d]
            if not 0 <= t < nd or t == d or self.twin[t] != d:
                raise PlaneGraphError(f"dangling dart {d}")
        seen = {}
        for v, rot in enumerate(self.rotations):
            for d in rot:
                if not 0 <= d < nd:
                    raise PlaneGraphError(f"rotation at {v} lists unknown dart {d}")
                if d in seen:
                    raise PlaneGraphError(f"dart {d} appears in two rotation slots")
                if self.dart_vertex[d] != v:
                    raise PlaneGraphError(f"dart {d} listed at vertex {v} but leaves {self.dart_vertex[d]}")
                seen[d] = v
        if len(seen) != nd:
            missing = sorted(set(range(nd)) - set(seen))
            raise PlaneGraphError(f"darts {missing} missing from rotations")

    @property
    def num_darts(self) -> int:
        return len(self.dart_vertex)

    @property
    def num_edges(self) -> int:
        return len(self.dart_vertex) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(d, self.twin[d]) for d in range(self.num_darts) if d < self.twin[d]]

    def head(self, d: int) -> int:
        return self.dart_vertex[self.twin[d]]

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        adj = {v: set() for v in range(self.n)}
        for d in range(self.num_darts):
            adj[self.dart_vertex[d]].add(self.head(d))
        stack, seen = [0], {0}
        while stack:
            v = stack.pop()
            for w in adj[v] - seen:
                seen.add(w)
                stack.append(w)
        return len(seen) == self.n

    def next_dart(self, d: int) -> int:
        t = self.twin[d]
        rot = self.rotations[self.dart_vertex[t]]
        return rot[rot.index(t) - 1]


@dataclass(frozen=True)
class Face:
    id: int
    boundary: tuple  # darts, starting with the smallest
    vertex_walk: tuple

    def __len__(self) -> int:
        return len(self.boundary)

    def walk_from(self, dart: int) -> tuple:
        k = self.boundary.index(dart)
        return self.vertex_walk[k:] + self.vertex_walk[:k]


def trace_faces(g: PlaneGraph) -> list[Face]:
    """All faces of ``g`` ordered by id (smallest boundary dart)."""
    if not g.is_connected():
        raise PlaneGraphError("graph is not connected")
    nxt = _next_table(g)
    seen = [False] * g.num_darts
    faces = []
    for start in range(g.num_darts):
        if seen[start]:
            continue
        walk = []
        d = start
        while not seen[d]:
            seen[d] = True
            walk.append(d)
            d = nxt[d]
        if d != start:
            raise PlaneGraphError("face tracing did not close up")
        faces.append(Face(start, tuple(walk), tuple(g.dart_vertex[x] for x in walk)))
    return faces


def _next_table(g: PlaneGraph) -> list[int]:
    pos = {}
    for v, rot in enumerate(g.rotations):
        for k, d in enumerate(rot):
            pos[d] = (v, k)
    nxt = []
    for d in range(g.num_darts):
        v, k = pos[g.twin[d]]
        nxt.append(g.rotations[v][k - 1])
    return nxt


def face_of(faces: list[Face], dart: int) -> Face:
    for f in faces:
        if dart in f.boundary:
            return f
    raise PlaneGraphError(f"dart {dart} not on any face")


def euler_characteristic(g: PlaneGraph, faces: list[Face] | None = None) -> int:
    faces = trace_faces(g) if faces is None else faces
    return g.n - g.num_edges + len(faces)


# --------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class Constraint:
    relation: str
    weight: Fraction
    anchor_dart: int
    scope: tuple | None = None  # when given, must match the walk read from the anchor

    def __post_init__(self):
        object.__setattr__(self, "weight", ext(self.weight))
        if self.scope is not None:
            object.__setattr__(self, "scope", tuple(self.scope))


@dataclass(frozen=True)
class PlaneInstance:
    graph: PlaneGraph
    domain_size: int
    relations: dict  # name -> WeightedRelation
    constraints: tuple
    outer_face: int | None = None  # any dart on the outer face boundary

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "relations", dict(self.relations))

    def faces(self) -> list[Face]:
        return trace_faces(self.graph)

    def outer(self, faces: list[Face] | None = None) -> Face | None:
        if self.outer_face is None:
            return None
        return face_of(faces or self.faces(), self.outer_face)

    def scopes(self, faces: list[Face] | None = None) -> list[tuple]:
        faces = faces or self.faces()
        out = []
        for c in self.constraints:
            if c.scope is not None:
                out.append(c.scope)
            else:
                out.append(face_of(faces, c.anchor_dart).walk_from(c.anchor_dart))
        return out

    def terms(self, faces: list[Face] | None = None) -> list[tuple]:
        """(weight, relation, scope) triples of the objective."""
        return [
            (c.weight, self.relations[c.relation], scope)
            for c, scope in zip(self.constraints, self.scopes(faces))
        ]

    def objective(self, assignment: Sequence[int], terms=None):
        terms = self.terms() if terms is None else terms
        total = Fraction(0)
        for w, rel, scope in terms:
            total = total + w * rel.value(tuple(assignment[v] for v in scope))
        return total


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    constraint: int | None = None


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __bool__(self) -> bool:
        return self.ok


def validate_instance(inst: PlaneInstance, for_expression: bool = False) -> ValidationReport:
    """Check an instance against the plane-instance conditions; collects every problem."""
    problems: list[Violation] = []
    g = inst.graph
    try:
        faces = trace_faces(g)
    except PlaneGraphError as exc:
        return ValidationReport((Violation("structure", str(exc)),))
    euler = euler_characteristic(g, faces)
    if euler != 2:
        problems.append(Violation("euler", f"n - |E| + |F| = {euler}, not 2"))
    outer = None
    if inst.outer_face is not None:
        if not 0 <= inst.outer_face < g.num_darts:
            problems.append(Violation("outer_face", f"unknown dart {inst.outer_face}"))
        else:
            outer = face_of(faces, inst.outer_face)
    elif for_expression:
        problems.append(Violation("outer_face", "no outer face declared"))
    used: dict[int, int] = {}
    for idx, c in enumerate(inst.constraints):
        if c.relation not in inst.relations:
            problems.append(Violation("relation", f"unknown relation {c.relation!r}", idx))
            continue
        rel = inst.relations[c.relation]
        if rel.domain_size != inst.domain_size:
            problems.append(Violation("relation", f"{c.relation!r} has domain {rel.domain_size}", idx))
        if c.weight is INF or c.weight < 0:
            problems.append(Violation("weight", f"weight {c.weight} is negative or infinite", idx))
        if not 0 <= c.anchor_dart < g.num_darts:
            problems.append(Violation("anchor", f"unknown anchor dart {c.anchor_dart}", idx))
            continue
        face = face_of(faces, c.anchor_dart)
        if face.id in used:
            problems.append(
                Violation("injectivity", f"face {face.id} hosts constraints {used[face.id]} and {idx}", idx)
            )
        else:
            used[face.id] = idx
        if for_expression and outer is not None and face.id == outer.id:
            problems.append(Violation("outer_face", "constraint placed on the outer face", idx))
        walk = face.walk_from(c.anchor_dart)
        if len(walk) != rel.arity:
            problems.append(
                Violation("arity", f"face walk has length {len(walk)}, relation arity {rel.arity}", idx)
            )
        if c.scope is not None and tuple(c.scope) != walk:
            problems.append(
                Violation("boundary", f"scope {tuple(c.scope)} differs from clockwise walk {walk}", idx)
            )
    return ValidationReport(tuple(problems))


DEFAULT_SOLVE_CAP = 2 ** 20


def solve(inst: PlaneInstance, cap: int = DEFAULT_SOLVE_CAP):
    """Exact brute-force minimum and the lexicographically smallest optimal assignment.

    Returns ``(INF, None)`` when no assignment is feasible.
    """
    n, d = inst.graph.n, inst.domain_size
    if d ** n > cap:
        raise BudgetExceeded(f"{d}^{n} assignments exceed the cap {cap}")
    terms = inst.terms()
    best, arg = INF, None
    for s in itertools.product(range(d), repeat=n):
        val = inst.objective(s, terms)
        if val < best:
            best, arg = val, s
    return best, arg


def relation_from_table(domain_size: int, arity: int, values) -> WeightedRelation:
    return WeightedRelation(domain_size, arity, tuple(values))
