import itertools
from fractions import Fraction

from hypothesis import settings, strategies as st

from planarvcsp.core import INF, WeightedRelation

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

VALUES = (Fraction(0), Fraction(1), Fraction(2), INF)


@st.composite
def relations(draw, domain_size=2, min_arity=1, max_arity=3, values=VALUES, nonempty=True):
    r = draw(st.integers(min_arity, max_arity))
    table = draw(st.lists(st.sampled_from(values), min_size=domain_size ** r, max_size=domain_size ** r))
    if nonempty and all(v is INF for v in table):
        table[draw(st.integers(0, len(table) - 1))] = Fraction(0)
    return WeightedRelation(domain_size, r, tuple(table))


@st.composite
def crisp_relations(draw, domain_size=2, min_arity=1, max_arity=3):
    r = draw(st.integers(min_arity, max_arity))
    tuples = list(itertools.product(range(domain_size), repeat=r))
    keep = draw(st.lists(st.sampled_from(tuples), unique=True))
    return WeightedRelation.crisp(domain_size, r, keep)
