import random

import pytest
from hypothesis import given, strategies as st

from planarvcsp import derivation as dv
from planarvcsp import express as ex
from planarvcsp.catalog import GAMMA_CUT, RHO_EQ, RHO_NEQ
from planarvcsp.core import INF, Language, WeightedRelation as WR, opt

from derivations import random_derivation, random_language

LANG = Language.of(gamma_cut=GAMMA_CUT, neq=RHO_NEQ)


def test_leaves():
    assert dv.evaluate(dv.base("gamma_cut"), LANG) == GAMMA_CUT
    assert dv.evaluate(dv.equality(), LANG) == RHO_EQ
    assert dv.evaluate(dv.zero(2), LANG) == WR(2, 2, (0, 0, 0, 0))
    assert dv.evaluate(dv.unary((1, INF)), LANG) == WR(2, 1, (1, INF))


def test_composite_semantics():
    d = dv.opt_of(dv.base("gamma_cut"))
    assert dv.evaluate(d, LANG) == RHO_NEQ
    d = dv.minimise(dv.eq_restrict(dv.base("gamma_cut"), 1), 1)
    assert dv.evaluate(d, LANG) == ex.minimise(ex.eq_restrict(GAMMA_CUT, 1), 1)
    assert dv.evaluate(dv.transpose(dv.base("gamma_cut")), LANG) == GAMMA_CUT
    assert dv.evaluate(dv.scaled(dv.base("gamma_cut"), 3), LANG).table == (3, 0, 0, 3)
    assert dv.scaled(dv.base("gamma_cut"), 1) == dv.base("gamma_cut")
    assert dv.shifted(dv.base("gamma_cut"), 0) == dv.base("gamma_cut")


def test_replay_checks_helpers():
    bad_twist = dv.twist(dv.base("gamma_cut"), 1, dv.equality())
    with pytest.raises(dv.DerivationError):
        dv.replay(bad_twist, LANG)
    bad_pin = dv.pin(dv.base("gamma_cut"), 0, 1, dv.unary((INF, 0)))
    with pytest.raises(dv.DerivationError):
        dv.replay(bad_pin, LANG)
    good = dv.twist(dv.base("gamma_cut"), 1, dv.base("neq"))
    assert dv.replays_to(good, LANG, ex.twist(GAMMA_CUT, 1))


def test_replay_can_forbid_free_unaries():
    d = dv.pin(dv.base("gamma_cut"), 0, 1, dv.unary((0, INF)))
    assert dv.uses_unary_leaves(d)
    dv.replay(d, LANG)
    with pytest.raises(dv.DerivationError):
        dv.replay(d, LANG, allow_unary=False)


def test_unknown_base_and_bad_shapes():
    with pytest.raises(dv.DerivationError):
        dv.evaluate(dv.base("missing"), LANG)
    with pytest.raises(dv.DerivationError):
        dv.Derivation("Minimise", {"i": 1}, ())
    with pytest.raises(dv.DerivationError):
        dv.Derivation("Frobnicate")


@given(st.integers(0, 10 ** 6), st.integers(0, 5))
def test_json_round_trip(seed, depth):
    rng = random.Random(seed)
    lang = random_language(rng)
    d = random_derivation(rng, lang, depth)
    again = dv.Derivation.from_json(d.to_json())
    assert again == d and again.dumps() == d.dumps()
    assert dv.evaluate(again, lang) == dv.evaluate(d, lang)


def test_order_key_prefers_smaller_trees():
    small = dv.opt_of(dv.base("gamma_cut"))
    big = dv.opt_of(dv.minimise(dv.eq_restrict(dv.base("gamma_cut"), 1), 1))
    assert small.order_key() < big.order_key()
    assert small.size() == 2 and big.depth() == 4


def test_arity_bookkeeping():
    d = dv.minimise(dv.base("gamma_cut"), 2)
    assert dv.derivation_arity(d, LANG) == 1
    assert dv.evaluate(dv.opt_of(d), LANG) == opt(WR(2, 1, (0, 0)))
