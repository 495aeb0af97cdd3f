import random

import pytest
from hypothesis import given, strategies as st

from planarvcsp import derivation as dv
from planarvcsp.catalog import RHO_EQ, RHO_NEQ
from planarvcsp.core import Language
from planarvcsp.gadgets import realize
from planarvcsp.plane import trace_faces, validate_instance

from derivations import KINDS, random_derivation, random_language, single_step


def _agrees(d, lang):
    real = realize(d, lang)
    assert real.verify() == []
    assert real.relation() == dv.evaluate(d, lang)
    return real


def test_equality_is_one_vertex_with_two_loops():
    real = _agrees(dv.equality(), Language.of(neq=RHO_NEQ))
    g = real.instance.graph
    assert (g.n, g.num_edges, len(trace_faces(g))) == (1, 2, 3)
    assert real.relation() == RHO_EQ


@pytest.mark.parametrize("kind", KINDS)
def test_each_operation_agrees_with_its_table(kind):
    rng = random.Random(kind)
    done = 0
    while done < 25:
        lang = random_language(rng)
        r = lang["g"].arity
        step = single_step(kind, dv.base("g"), r, rng, lang)
        if step is None:
            continue
        _agrees(step[0], lang)
        done += 1


@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_random_derivations_agree_with_tables(seed, depth):
    rng = random.Random(seed)
    lang = random_language(rng)
    _agrees(random_derivation(rng, lang, depth), lang)


def test_realized_instances_validate():
    rng = random.Random(7)
    for _ in range(20):
        lang = random_language(rng)
        real = realize(random_derivation(rng, lang, 3), lang)
        assert validate_instance(real.instance, for_expression=True).ok
