import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from planarvcsp.catalog import (GAMMA_0, GAMMA_1, GAMMA_CUT, GAMMA_IMP, GAMMA_NEQ, MAX, MIN, MJRT, MNRT, NEG,
                                RHO_1, RHO_1IN3, RHO_CROSS, RHO_EQ, RHO_NAE, RHO_NEQ, mm)
from planarvcsp.core import (INF, BudgetExceeded, OpTable, WeightedRelation as WR, add_constant,
                             apply_componentwise, evaluate, ext, feas, is_2_decomposable, is_multimorphism,
                             is_polymorphism, opt, project, projection, scale)

from conftest import crisp_relations, relations


def test_evaluate_catalog_entries():
    assert evaluate(GAMMA_CUT, (0, 0)) == 1
    assert evaluate(GAMMA_CUT, (0, 1)) == 0
    assert evaluate(RHO_NAE, (1, 1, 1)) is INF


@pytest.mark.parametrize("t", [(0,), (0, 2), (0, 1, 1)])
def test_evaluate_rejects_bad_tuples(t):
    with pytest.raises(ValueError):
        evaluate(GAMMA_CUT, t)


def test_infinity_arithmetic():
    assert INF + 3 is INF
    assert Fraction(2) + INF is INF
    assert INF * 0 is INF
    assert ext("inf") is INF and ext("3/4") == Fraction(3, 4)


def test_feas_examples():
    assert feas(GAMMA_CUT) == WR(2, 2, (0, 0, 0, 0))
    assert feas(RHO_NAE) == RHO_NAE
    empty = WR(2, 1, (INF, INF))
    assert feas(empty) == empty


def test_opt_examples():
    assert opt(GAMMA_CUT) == RHO_NEQ
    assert opt(GAMMA_1) == RHO_1
    assert opt(RHO_NAE) == RHO_NAE
    assert opt(WR(2, 2, (INF,) * 4)) == WR(2, 2, (INF,) * 4)


def test_scale_and_shift_examples():
    assert scale(GAMMA_CUT, 0) == WR(2, 2, (0, 0, 0, 0))
    assert scale(RHO_NAE, 0) == RHO_NAE
    assert scale(GAMMA_CUT, Fraction(5, 3)).table == (Fraction(5, 3), 0, 0, Fraction(5, 3))
    assert add_constant(GAMMA_CUT, -1).table == (0, -1, -1, 0)
    assert {v for v in add_constant(RHO_NAE, 7).table if v is not INF} == {7}
    assert add_constant(GAMMA_IMP, 0) == GAMMA_IMP
    with pytest.raises(ValueError):
        scale(GAMMA_CUT, -1)


@given(relations(max_arity=2), st.fractions(min_value=0, max_value=5, max_denominator=7))
def test_feas_and_opt_ignore_scaling(g, c):
    assert feas(scale(g, c)) == feas(g)
    if c > 0:
        assert opt(scale(g, c)) == opt(g)


@given(relations(max_arity=2), st.fractions(min_value=-5, max_value=5, max_denominator=7))
def test_opt_ignores_shift(g, c):
    assert opt(add_constant(g, c)) == opt(g)


def test_apply_componentwise_examples():
    assert apply_componentwise(MIN, [(0, 1), (1, 0)]) == (0, 0)
    assert apply_componentwise(MNRT, [(0, 1), (0, 1), (1, 0)]) == (1, 0)
    xs = [(0, 1, 1), (1, 0, 1), (1, 1, 0)]
    assert apply_componentwise(projection(2, 3, 2), xs) == xs[1]


def test_polymorphism_examples():
    v = is_polymorphism(MIN, [RHO_NEQ])
    assert not v.holds and apply_componentwise(MIN, v.witness) == (0, 0)
    assert is_polymorphism(MNRT, [RHO_NEQ]).holds
    for k, i in [(1, 1), (2, 2), (3, 1)]:
        assert is_polymorphism(projection(2, k, i), [RHO_NAE, RHO_1IN3, GAMMA_CUT]).holds


def test_multimorphism_examples():
    v = is_multimorphism(mm(MIN, MAX), [GAMMA_CUT])
    assert v.status == "fails" and set(v.witness) == {(0, 1), (1, 0)}
    assert is_multimorphism(mm(NEG), [GAMMA_CUT]).status == "holds_with_equality"
    assert is_multimorphism(mm(MIN, MAX), [GAMMA_IMP]).status == "holds"


def test_multimorphism_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        is_multimorphism(mm(MJRT, MJRT, MJRT), [RHO_NAE], budget=10)


@given(relations(max_arity=3), st.integers(1, 3))
def test_identity_multimorphism_has_equality(g, k):
    ids = mm(*[projection(2, k, i) for i in range(1, k + 1)])
    assert is_multimorphism(ids, [g]).status == "holds_with_equality"


ALL_OPS_2 = [OpTable(2, 2, t) for t in itertools.product(range(2), repeat=4)]


@given(crisp_relations(max_arity=3), st.sampled_from(ALL_OPS_2 + [MJRT, MNRT, NEG]))
def test_multimorphism_of_copies_matches_polymorphism(rho, f):
    copies = mm(*[f] * f.arity)
    assert is_multimorphism(copies, [rho]).holds == is_polymorphism(f, [rho]).holds


def test_projection_examples():
    assert project(RHO_1IN3, 1, 2) == WR.crisp(2, 2, [(0, 0), (0, 1), (1, 0)])
    assert project(RHO_CROSS, 1, 3) == RHO_EQ
    assert project(RHO_NEQ, 1, 2) == RHO_NEQ
    with pytest.raises(ValueError):
        project(RHO_NEQ, 1, 3)


def test_two_decomposability_examples():
    assert is_2_decomposable(RHO_NEQ).holds and is_2_decomposable(RHO_1).holds
    v = is_2_decomposable(RHO_1IN3)
    assert not v.holds and v.witness == ((0, 0, 0),)
    assert is_2_decomposable(RHO_CROSS).holds


def _consistent_bruteforce(rho):
    r, d = rho.arity, rho.domain_size
    feas_ = set(rho.feasible_tuples())
    out = set()
    for t in itertools.product(range(d), repeat=r):
        if all(any(s[i] == t[i] and s[j] == t[j] for s in feas_) for i in range(r) for j in range(r)):
            out.add(t)
    return out


@given(st.integers(2, 3).flatmap(lambda d: crisp_relations(domain_size=d, min_arity=1, max_arity=4 if d == 2 else 3)))
def test_two_decomposability_matches_bruteforce(rho):
    consistent = _consistent_bruteforce(rho)
    assert is_2_decomposable(rho).holds == (consistent == set(rho.feasible_tuples()))
    for i, j in itertools.product(range(1, rho.arity + 1), repeat=2):
        pairs = {(t[i - 1], t[j - 1]) for t in rho.feasible_tuples()}
        assert set(project(rho, i, j).feasible_tuples()) == pairs


def test_catalog_facts():
    assert sum(v == 0 for v in RHO_1IN3.table) == 3
    assert GAMMA_NEQ(0, 0) == 1 and GAMMA_NEQ(0, 1) == 0
    assert MJRT(0, 0, 1) == 0
    assert opt(GAMMA_0).feasible_tuples() == [(0,)]


def test_relation_validation():
    with pytest.raises(ValueError):
        WR(2, 2, (0, 0, 0))
    with pytest.raises(ValueError):
        OpTable(2, 1, (0, 2))
