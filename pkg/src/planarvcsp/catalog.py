"""Named relations, languages and operations used throughout the package."""

from __future__ import annotations

from .core import (
    INF,
    Language,
    MultimorphismCandidate,
    OpTable,
    WeightedRelation,
    projection,
)

B = 2
WR = WeightedRelation


def _crisp(arity, tuples, d=B):
    return WR.crisp(d, arity, tuples)


RHO_0 = _crisp(1, [(0,)])
RHO_1 = _crisp(1, [(1,)])
RHO_NEQ = _crisp(2, [(0, 1), (1, 0)])
RHO_EQ = _crisp(2, [(0, 0), (1, 1)])
RHO_UP = _crisp(2, [(0, 0), (0, 1), (1, 0)])
RHO_1IN3 = _crisp(3, [(0, 0, 1), (0, 1, 0), (1, 0, 0)])
RHO_NAE = WR.from_function(B, 3, lambda x, y, z: INF if x == y == z else 0)
RHO_CROSS = _crisp(4, [(0, 0, 0, 0), (0, 1, 0, 1), (1, 0, 1, 0), (1, 1, 1, 1)])
RHO_NAND = WR.from_function(B, 2, lambda x, y: INF if x == y == 1 else 0)

GAMMA_0 = WR(B, 1, (0, 1))
GAMMA_1 = WR(B, 1, (1, 0))
GAMMA_NEQ = WR.from_function(B, 2, lambda x, y: 0 if x != y else 1)
GAMMA_CUT = WR.from_function(B, 2, lambda x, y: 1 if x == y else 0)
GAMMA_IS_UNARY = WR.from_function(B, 1, lambda x: 1 - x)
# submodular "implication" penalty: only (1, 0) costs
GAMMA_IMP = WR(B, 2, (0, 0, 1, 0))


def rho_eq(d: int) -> WeightedRelation:
    return WR.from_function(d, 2, lambda x, y: 0 if x == y else INF)


def rho_subdomain(d: int, subdomain) -> WeightedRelation:
    sub = set(subdomain)
    return WR.from_function(d, 1, lambda x: 0 if x in sub else INF)


def gamma_col(d: int) -> WeightedRelation:
    """Disequality (colouring) relation on a domain of size d."""
    return WR.from_function(d, 2, lambda x, y: 0 if x != y else INF)


RELATIONS = {
    "rho_0": RHO_0,
    "rho_1": RHO_1,
    "rho_neq": RHO_NEQ,
    "rho_eq": RHO_EQ,
    "rho_up": RHO_UP,
    "rho_1in3": RHO_1IN3,
    "rho_nae": RHO_NAE,
    "rho_cross": RHO_CROSS,
    "rho_nand": RHO_NAND,
    "gamma_0": GAMMA_0,
    "gamma_1": GAMMA_1,
    "gamma_neq": GAMMA_NEQ,
    "gamma_cut": GAMMA_CUT,
    "gamma_is_unary": GAMMA_IS_UNARY,
    "gamma_imp": GAMMA_IMP,
    "gamma_col3": gamma_col(3),
    "gamma_col4": gamma_col(4),
}

# ---- operations on {0, 1}

C0 = OpTable.from_function(B, 1, lambda x: 0, "c0")
C1 = OpTable.from_function(B, 1, lambda x: 1, "c1")
NEG = OpTable.from_function(B, 1, lambda x: 1 - x, "neg")
MIN = OpTable.from_function(B, 2, min, "min")
MAX = OpTable.from_function(B, 2, max, "max")
MNRT = OpTable.from_function(B, 3, lambda x, y, z: x ^ y ^ z, "mnrt")
MJRT = OpTable.from_function(B, 3, lambda x, y, z: int(x + y + z >= 2), "mjrt")

OPERATIONS = {op.name: op for op in (C0, C1, NEG, MIN, MAX, MNRT, MJRT)}


def mm(*ops: OpTable, name: str | None = None) -> MultimorphismCandidate:
    return MultimorphismCandidate(tuple(ops), name or ",".join(o.name for o in ops))


# the eight tractable Boolean cases, in the order they are reported
EIGHT = (
    mm(C0),
    mm(C1),
    mm(MIN, MIN),
    mm(MAX, MAX),
    mm(MIN, MAX),
    mm(MNRT, MNRT, MNRT),
    mm(MJRT, MJRT, MJRT),
    mm(MJRT, MJRT, MNRT),
)
NEGATION = mm(NEG)


def candidate(name: str, domain_size: int = B) -> MultimorphismCandidate:
    """Look up a candidate by comma-separated operation names, e.g. ``"min,max"``.

    ``"id"`` with k copies gives k identical projections ``e^k_i`` per slot.
    """
    parts = [p.strip() for p in name.split(",") if p.strip()]
    k = len(parts)
    ops = []
    for i, p in enumerate(parts, start=1):
        if p == "id":
            ops.append(projection(domain_size, k, i))
        elif p.startswith("e") and "_" in p:
            kk, ii = p[1:].split("_")
            ops.append(projection(domain_size, int(kk), int(ii)))
        else:
            if domain_size != B:
                raise KeyError(f"operation {p!r} is only defined on the Boolean domain")
            ops.append(OPERATIONS[p])
    return MultimorphismCandidate(tuple(ops), name)


LANGUAGES = {
    "gamma_nae": Language.of(rho_nae=RHO_NAE),
    "gamma_cut": Language.of(gamma_cut=GAMMA_CUT),
    "gamma_is": Language.of(rho_nand=RHO_NAND, gamma_is_unary=GAMMA_IS_UNARY),
    "gamma_imp": Language.of(gamma_imp=GAMMA_IMP),
    "gamma_cut_g0": Language.of(gamma_cut=GAMMA_CUT, gamma_0=GAMMA_0),
    "gamma_cut_g1": Language.of(gamma_cut=GAMMA_CUT, gamma_1=GAMMA_1),
    "gamma_cut_g01": Language.of(gamma_cut=GAMMA_CUT, gamma_0=GAMMA_0, gamma_1=GAMMA_1),
    "rho_neq": Language.of(rho_neq=RHO_NEQ),
    "rho_eq": Language.of(rho_eq=RHO_EQ),
    "one_in_three": Language.of(rho_1in3=RHO_1IN3),
}


def catalog() -> dict:
    """Relations, languages and operations in one mapping."""
    return {"relations": dict(RELATIONS), "languages": dict(LANGUAGES), "operations": dict(OPERATIONS)}
