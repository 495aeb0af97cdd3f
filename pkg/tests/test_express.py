import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from planarvcsp import express as ex
from planarvcsp.catalog import GAMMA_0, GAMMA_1, GAMMA_CUT, RHO_EQ, RHO_NAE, RHO_NEQ, rho_eq
from planarvcsp.core import INF, BudgetExceeded, WeightedRelation as WR, opt
from planarvcsp.fixtures import star_instance, two_loops_instance
from planarvcsp.plane import Constraint, PlaneGraph, PlaneInstance, solve

from conftest import relations


# independent table semantics

def _pin(g, a, i):
    return WR.from_function(g.domain_size, g.arity - 1,
                            lambda *t: g.value(t[:i - 1] + (a,) + t[i - 1:]))


def _minimise(g, i):
    d = g.domain_size
    return WR.from_function(d, g.arity - 1,
                            lambda *t: min(g.value(t[:i - 1] + (a,) + t[i - 1:]) for a in range(d)))


def _restrict(g, i, same):
    r = g.arity
    j = i % r  # wrap-around partner
    return WR.from_function(g.domain_size, r, lambda *t: g.value(t) if (t[i - 1] == t[j]) == same else INF)


def _join(g1, g2, z1, z2):
    d = g1.domain_size

    def val(x, y):
        best = INF
        for z in range(d):
            a = g1.value((x, z) if z1 == 2 else (z, x))
            b = g2.value((y, z) if z2 == 2 else (z, y))
            best = min(best, a + b)
        return best
    return WR.from_function(d, 2, val)


@given(relations(min_arity=2, max_arity=3), st.data())
def test_pin_minimise_restrict_match_definitions(g, data):
    i = data.draw(st.integers(1, g.arity))
    a = data.draw(st.integers(0, 1))
    assert ex.pin(g, a, i) == _pin(g, a, i)
    assert ex.minimise(g, i) == _minimise(g, i)
    assert ex.eq_restrict(g, i) == _restrict(g, i, True)
    assert ex.neq_restrict(g, i) == _restrict(g, i, False)


@given(st.integers(2, 3).flatmap(lambda d: st.tuples(relations(d, 2, 2), relations(d, 2, 2))),
       st.sampled_from([1, 2]), st.sampled_from([1, 2]))
def test_join_matches_definition(pair, z1, z2):
    g1, g2 = pair
    assert ex.join(g1, g2, z1, z2) == _join(g1, g2, z1, z2)


@given(relations(max_arity=3), st.data())
def test_twist_is_an_involution(g, data):
    i = data.draw(st.integers(1, g.arity))
    tw = ex.twist(g, i)
    assert ex.twist(tw, i) == g
    for t in g.tuples():
        assert tw.value(t) == g.value(ex.xor(t, ex.unit(g.arity, i)))


@given(relations(min_arity=2, max_arity=3), st.data())
def test_adding_zero_unary_is_neutral(g, data):
    i = data.draw(st.integers(1, g.arity))
    zero = WR(2, 1, (0, 0))
    assert ex.minimise(ex.add_unary(g, zero, i), i) == ex.minimise(g, i)


def test_restriction_examples():
    assert ex.minimise(ex.eq_restrict(RHO_NAE, 1), 1) == RHO_NEQ
    assert ex.pin(GAMMA_CUT, 0, 1) == WR(2, 1, (1, 0))
    assert ex.restrict_domain(GAMMA_CUT, {0}, 1) == WR(2, 2, (1, 0, INF, INF))
    assert ex.apply_restriction(GAMMA_CUT, "pin", 1, 0) == ex.pin(GAMMA_CUT, 0, 1)
    with pytest.raises(ValueError):
        ex.pin(GAMMA_CUT, 2, 1)
    with pytest.raises(ValueError):
        ex.eq_restrict(GAMMA_0, 1)


def test_minimise_and_join_examples():
    assert ex.minimise(GAMMA_CUT, 2) == WR(2, 1, (0, 0))
    assert ex.join(RHO_EQ, RHO_EQ) == RHO_EQ
    a, b, c, s1, t1, s2, t2 = range(7)
    r1 = WR.crisp(7, 2, [(c, s1), (a, s1), (b, t1)])
    r2 = WR.crisp(7, 2, [(b, s2), (c, s2), (a, t2)])
    assert ex.join(r1, r2, 1, 1) == WR.crisp(7, 2, [(s1, s2), (s1, t2), (t1, s2)])


def test_twist_examples():
    tw = ex.twist(RHO_NAE, 1)
    infeasible = {t for t in tw.tuples() if tw.value(t) is INF}
    assert infeasible == {(0, 1, 1), (1, 0, 0)}
    assert ex.twist(GAMMA_0, 1) == GAMMA_1
    with pytest.raises(ValueError):
        ex.twist(rho_eq(3), 1)


def test_tuple_kit():
    assert ex.zeros(3) == (0, 0, 0) and ex.ones(2) == (1, 1)
    assert ex.unit(3, 2) == (0, 1, 0)
    x = (1, 0, 1)
    assert ex.negate(x) == ex.xor(x, ex.ones(3)) == (0, 1, 0)
    assert ex.merge_parts((0, 0, 0), (1, 1, 1), {1, 3}) == (0, 1, 0)


def test_pi_v_examples():
    inst, v = star_instance()
    star = WR.from_function(2, 3, lambda x, y, z: 0 if x == y == z else 1)
    assert ex.pi_v(inst, v) == star
    loops, v = two_loops_instance()
    assert ex.pi_v(loops, v) == RHO_EQ
    assert ex.pi_v(*two_loops_instance(3)) == rho_eq(3)


def _wrapped(g: WR) -> tuple[PlaneInstance, tuple]:
    """A single cycle x1..xr with g on the inner face; v is the scope reversed on the outer walk."""
    r = g.arity
    if r == 1:
        graph = PlaneGraph.from_edges(1, (0, 0), ((0, 1),), ((0, 1),))
        return PlaneInstance(graph, g.domain_size, {"g": g}, (Constraint("g", 1, 0),), outer_face=1), (0,)
    dv, edges = [], []
    for k in range(r):
        dv += [k, (k + 1) % r]
        edges.append((2 * k, 2 * k + 1))
    rot = [(2 * k, 2 * ((k - 1) % r) + 1) for k in range(r)]
    graph = PlaneGraph.from_edges(r, dv, edges, rot)
    inst = PlaneInstance(graph, g.domain_size, {"g": g}, (Constraint("g", 1, 0),), outer_face=1)
    return inst, inst.scopes()[0]


@given(relations(max_arity=3))
def test_pi_v_of_wrapped_relation_is_the_relation(g):
    inst, v = _wrapped(g)
    assert ex.pi_v(inst, v) == g
    assert ex.pi_v_bruteforce(inst, v) == g


def test_pi_v_rejects_bad_queries():
    inst, v = star_instance()
    with pytest.raises(ValueError):
        ex.pi_v(inst, tuple(reversed(v)))
    with pytest.raises(BudgetExceeded):
        ex.pi_v_bruteforce(inst, v, cap=4)


@given(st.integers(0, 10 ** 6))
def test_pi_v_elimination_matches_bruteforce(seed):
    import random
    from planar_maps import random_plane_graph
    from planarvcsp.plane import trace_faces
    rng = random.Random(seed)
    g = random_plane_graph(rng, rng.randint(0, 7))
    faces = trace_faces(g)
    outer = rng.choice(faces)
    rels, cons = {}, []
    for f in faces:
        if f.id == outer.id or len(f) > 3:
            continue
        rels[f"r{f.id}"] = WR(2, len(f), tuple(rng.choice([INF, 0, 1, 2]) for _ in range(2 ** len(f))))
        cons.append(Constraint(f"r{f.id}", Fraction(rng.randint(0, 2)), f.boundary[0]))
    inst = PlaneInstance(g, 2, rels, cons, outer.boundary[0])
    v = tuple(reversed(outer.vertex_walk))
    assert ex.pi_v(inst, v) == ex.pi_v_bruteforce(inst, v)


def test_scaling_multiplier():
    assert ex.scaling_multiplier(WR(2, 1, (0, 2)), 5) == Fraction(7, 2)
    assert ex.scaling_multiplier(WR(2, 1, (3, INF)), 5) == 0


def _opt_star(k):
    """Star instance with constraint k read as Opt(gamma_cut)."""
    inst, v = star_instance()
    rels = dict(inst.relations, opt_cut=opt(GAMMA_CUT))
    cons = list(inst.constraints)
    cons[k] = Constraint("opt_cut", cons[k].weight, cons[k].anchor_dart, cons[k].scope)
    return PlaneInstance(inst.graph, 2, rels, tuple(cons), inst.outer_face), v


@pytest.mark.parametrize("k", [0, 1, 2])
def test_opt_by_scaling_on_star(k):
    with_opt, v = _opt_star(k)
    scaled = ex.opt_by_scaling(with_opt, k, GAMMA_CUT)
    # compare optimal assignments for every boundary labelling that leaves the Opt instance feasible
    n = with_opt.graph.n
    for x in itertools.product(range(2), repeat=3):
        pins = dict(zip(v, x))

        def best(inst):
            vals = {s: inst.objective(s) for s in itertools.product(range(2), repeat=n)
                    if all(s[u] == a for u, a in pins.items())}
            m = min(vals.values())
            return m, {s for s, val in vals.items() if val == m}

        m_opt, arg_opt = best(with_opt)
        if m_opt is INF:
            continue
        assert best(scaled)[1] == arg_opt
    # globally as well: the scaled optimum is optimal for the Opt instance
    assert with_opt.objective(solve(scaled)[1]) == solve(with_opt)[0]


def test_opt_by_scaling_single_value_uses_weight_zero():
    with_opt, _ = _opt_star(0)
    flat = WR(2, 2, (3, INF, 3, 3))
    out = ex.opt_by_scaling(with_opt, 0, flat)
    assert out.constraints[0].weight == 0
    with pytest.raises(ValueError):
        ex.opt_by_scaling(with_opt, 0, WR(2, 2, (INF,) * 4))
