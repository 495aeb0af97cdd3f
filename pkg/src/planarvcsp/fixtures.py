"""Hand-built plane instances used as worked examples and test vectors.

Rotations were read off the drawings: at each vertex the darts are listed in
order of decreasing angle (clockwise on a page with y pointing up).
"""

from __future__ import annotations

from fractions import Fraction

from .catalog import GAMMA_1, GAMMA_CUT, GAMMA_IMP, RHO_NAE
from .core import WeightedRelation
from .plane import Constraint, PlaneGraph, PlaneInstance

X1, X2, X3, X4 = 0, 1, 2, 3


def four_constraint_graph() -> PlaneGraph:
    """Four variables, seven edges: a loop at x1, triangle x1 x2 x3, a lens on
    x2-x3 and a lens on x3-x4.

    Darts: 0/1 x1-x2, 2/3 x1-x3, 4/5 x2-x3, 6/7 loop at x1 (6 leaves to the
    upper left), 8/9 lower x2-x3 arc, 10/11 x3-x4, 12/13 lower x3-x4 arc.
    """
    dart_vertex = (X1, X2, X1, X3, X2, X3, X1, X1, X2, X3, X3, X4, X3, X4)
    edges = ((0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11), (12, 13))
    rotations = (
        (6, 7, 0, 2),         # x1: loop-left, loop-right, to x2, to x3
        (8, 4, 1),            # x2: lower arc, straight to x3, to x1
        (3, 5, 9, 12, 10),    # x3: to x1, to x2, lower arc to x2, lower arc to x4, to x4
        (11, 13),             # x4: to x3, lower arc
    )
    return PlaneGraph.from_edges(4, dart_vertex, edges, rotations)


FOUR_CONSTRAINT_RELATIONS = {
    "gamma1": GAMMA_1,
    "gamma2": RHO_NAE,
    "gamma3": GAMMA_CUT,
    "gamma4": GAMMA_IMP,
}


def four_constraint_instance(reverse_gamma3: bool = False) -> PlaneInstance:
    """C = 2 g1(x1) + 0 g2(x2,x3,x1) + g3(x3,x2) + 5/3 g4(x3,x4) on the graph above.

    ``reverse_gamma3`` writes the third scope as (x2, x3), which does not match
    the clockwise walk of its face.
    """
    g3_scope = (X2, X3) if reverse_gamma3 else (X3, X2)
    constraints = (
        Constraint("gamma1", Fraction(2), 6, (X1,)),
        Constraint("gamma2", Fraction(0), 4, (X2, X3, X1)),
        Constraint("gamma3", Fraction(1), 5, g3_scope),
        Constraint("gamma4", Fraction(5, 3), 12, (X3, X4)),
    )
    return PlaneInstance(four_constraint_graph(), 2, FOUR_CONSTRAINT_RELATIONS, constraints, outer_face=7)


def star_instance(relation: WeightedRelation = GAMMA_CUT, name: str = "gamma_cut") -> tuple[PlaneInstance, tuple]:
    """Three binary constraints g(x_k, z) in lenses around a centre z, with
    x1 x2 x3 on the outer face.  Returns the instance and v = (x1, x2, x3).

    Vertices: x1, x2, x3 = 0, 1, 2 and z = 3.  For each k the lens x_k - z uses
    darts zL_k/xL_k (left arc seen from z) and zR_k/xR_k; the outer triangle
    uses a12/a21, a23/a32, a31/a13.
    """
    z = 3
    dv = []
    twin_pairs = []

    def edge(u, w):
        p = len(dv)
        dv.extend([u, w])
        twin_pairs.append((p, p + 1))
        return p, p + 1

    zL, xL, zR, xR = {}, {}, {}, {}
    for k in range(3):
        zL[k], xL[k] = edge(z, k)
        zR[k], xR[k] = edge(z, k)
    a12, a21 = edge(0, 1)
    a23, a32 = edge(1, 2)
    a31, a13 = edge(2, 0)
    rotations = (
        (a12, xR[0], xL[0], a13),
        (a23, xR[1], xL[1], a21),
        (a31, xR[2], xL[2], a32),
        (zL[0], zR[0], zL[1], zR[1], zL[2], zR[2]),
    )
    graph = PlaneGraph.from_edges(4, dv, twin_pairs, rotations)
    constraints = tuple(Constraint(name, Fraction(1), xR[k], (k, z)) for k in range(3))
    return PlaneInstance(graph, relation.domain_size, {name: relation}, constraints, outer_face=a21), (0, 1, 2)


def two_loops_instance(domain_size: int = 2) -> tuple[PlaneInstance, tuple]:
    """One vertex with two self-loops and no constraints; v = (x, x)."""
    graph = PlaneGraph.from_edges(1, (0, 0, 0, 0), ((0, 1), (2, 3)), ((0, 1, 2, 3),))
    return PlaneInstance(graph, domain_size, {}, (), outer_face=1), (0, 0)


def single_edge_graph() -> PlaneGraph:
    return PlaneGraph.from_edges(2, (0, 1), ((0, 1),), ((0,), (1,)))


def nae_loop_instance() -> PlaneInstance:
    """One vertex with three loops nested so that one face walks x three times,
    carrying rho_nae(x, x, x)."""
    # rotation a a' b b' c c': faces [a], [b], [c] and [a', b', c'] of length 3
    graph = PlaneGraph.from_edges(1, (0,) * 6, ((0, 1), (2, 3), (4, 5)), ((0, 1, 2, 3, 4, 5),))
    return PlaneInstance(graph, 2, {"rho_nae": RHO_NAE}, (Constraint("rho_nae", 1, 1),), outer_face=0)
