import random

import pytest
from hypothesis import given, settings, strategies as st

from planarvcsp import classify_boolean as cb
from planarvcsp import derivation as dv
from planarvcsp.catalog import (EIGHT, GAMMA_0, GAMMA_CUT, LANGUAGES, NEGATION, RHO_0, RHO_1,
                                RHO_1IN3, RHO_EQ, RHO_NAE, RHO_NEQ, rho_eq)
from planarvcsp.core import Language, is_multimorphism
from planarvcsp.gadgets import realize

from derivations import random_relation


def _replays(lang, derived, target):
    return dv.replay(derived.derivation, lang, allow_unary=False) == target == derived.relation


def test_check_eight_examples():
    imp = dict((n, v.status) for n, v in cb.check_eight(LANGUAGES["gamma_imp"]))
    assert imp["min,max"] != "fails"
    assert all(v.status == "fails" for _, v in cb.check_eight(Language.of(rho_nae=RHO_NAE)))
    assert all(v.holds for _, v in cb.check_eight(Language.of(rho_eq=RHO_EQ)))
    with pytest.raises(ValueError):
        cb.check_eight(Language.of(eq3=rho_eq(3)))


@pytest.mark.parametrize("name,verdict,code", [
    ("gamma_imp", cb.TRACTABLE, 0),
    ("gamma_nae", cb.SELF_COMPLEMENTARY, 4),
    ("gamma_cut", cb.SELF_COMPLEMENTARY, 4),
    ("gamma_is", cb.INTRACTABLE, 3),
    ("gamma_cut_g0", cb.INTRACTABLE, 3),
    ("gamma_cut_g1", cb.INTRACTABLE, 3),
    ("one_in_three", cb.INTRACTABLE, 3),
])
def test_verdict_table(name, verdict, code):
    v = cb.classify_boolean(LANGUAGES[name])
    assert v.verdict == verdict and v.exit_code == code
    if verdict == cb.TRACTABLE:
        assert is_multimorphism(EIGHT[[m.name for m in EIGHT].index(v.multimorphism)], LANGUAGES[name]).holds
    if verdict == cb.INTRACTABLE:
        assert cb.verify_derivations(LANGUAGES[name], v.derivations) == []


def test_gamma_imp_admits_min_max():
    v = cb.classify_boolean(LANGUAGES["gamma_imp"])
    assert "min,max" in v.holding


def test_constants_for_gamma_is():
    lang = LANGUAGES["gamma_is"]
    out = cb.derive_constants(lang)
    assert set(out) >= {"rho0", "rho1"}
    assert _replays(lang, out["rho0"], RHO_0) and _replays(lang, out["rho1"], RHO_1)


def test_constants_from_disequality_alone():
    lang = Language.of(rho_neq=RHO_NEQ)
    out = cb.derive_constants(lang)
    assert "rho_neq" in out and _replays(lang, out["rho_neq"], RHO_NEQ)


def test_neq_branches():
    lang = LANGUAGES["gamma_is"]
    consts = cb.derive_constants(lang)
    assert _replays(lang, cb.derive_neq(lang, consts["rho0"], consts["rho1"]), RHO_NEQ)
    r0, r1 = cb.Derived(RHO_0, dv.base("rho_0")), cb.Derived(RHO_1, dv.base("rho_1"))
    for extra in ({"gamma_cut": GAMMA_CUT}, {"rho_neq": RHO_NEQ}):
        lang = Language.of(rho_0=RHO_0, rho_1=RHO_1, **extra)
        assert _replays(lang, cb.derive_neq(lang, r0, r1), RHO_NEQ)


def test_constants_from_neq():
    lang = Language.of(gamma_0=GAMMA_0, rho_neq=RHO_NEQ)
    neq = cb.Derived(RHO_NEQ, dv.base("rho_neq"))
    r0, r1 = cb.derive_consts_from_neq(lang, neq)
    assert _replays(lang, r0, RHO_0) and _replays(lang, r1, RHO_1)
    with pytest.raises(cb.SynthesisError):
        cb.derive_consts_from_neq(Language.of(gamma_cut=GAMMA_CUT, rho_neq=RHO_NEQ), neq)


def test_one_in_three_found_directly():
    lang = Language.of(rho_1in3=RHO_1IN3, rho_0=RHO_0, rho_1=RHO_1, rho_neq=RHO_NEQ)
    got = cb.derive_one_in_three(lang, cb.Derived(RHO_0, dv.base("rho_0")), cb.Derived(RHO_1, dv.base("rho_1")),
                                 cb.Derived(RHO_NEQ, dv.base("rho_neq")))
    assert _replays(lang, got, RHO_1IN3)


@pytest.mark.parametrize("name", ["gamma_is", "gamma_cut_g0"])
def test_synthesis_realizes_one_in_three(name):
    lang = LANGUAGES[name]
    ders = cb.synthesize(lang)
    assert cb.verify_derivations(lang, ders) == []
    real = realize(ders["rho_1in3"], lang)
    assert real.verify() == []
    assert real.relation() == RHO_1IN3


def test_verdict_json_is_deterministic():
    a = cb.classify_boolean(LANGUAGES["gamma_is"]).to_json()
    b = cb.classify_boolean(LANGUAGES["gamma_is"]).to_json()
    assert a == b and a["verdict"] == cb.INTRACTABLE


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_verdicts_are_sound_on_random_languages(seed):
    rng = random.Random(seed)
    lang = Language(2, tuple((f"g{k}", random_relation(rng, rng.randint(1, 3))) for k in range(rng.randint(1, 2))))
    v = cb.classify_boolean(lang)
    holding = [m for m in EIGHT if is_multimorphism(m, lang).holds]
    # tractable exactly when one of the eight holds; the two outcomes never overlap
    assert (v.verdict == cb.TRACTABLE) == bool(holding)
    if v.verdict == cb.SELF_COMPLEMENTARY:
        assert is_multimorphism(NEGATION, lang).holds
    if v.verdict == cb.INTRACTABLE:
        assert cb.verify_derivations(lang, v.derivations) == []
    assert v.verdict != cb.EXHAUSTED
