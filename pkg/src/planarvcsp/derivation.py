"""Derivation trees: certificates that a relation lies in a planar closure.

A derivation is an immutable tree of operation nodes over a base language.
``evaluate`` computes its exact table semantics; ``replay`` does the same while
checking that every helper child really is the relation its parent relies on
(for instance that the helper of a twist evaluates to disequality).

Node kinds and their children:

===============  =====================  ==================================
kind             params                 children
===============  =====================  ==================================
Base             name                   -
Unary            table                  -          (free unary leaf)
Zero             arity                  -          (constant 0 relation)
Equality         -                      -
AddUnary         i                      child, unary
AddBinary        i                      child, binary  (adds b(x_i, x_i+1))
Minimise         i                      child
Join             z1, z2                 left, right
RestrictDomain   i, subdomain           child, helper for rho_{D'}
Pin              i, a                   child, helper for rho_{a}
EqRestrict       i                      child
NeqRestrict      i                      child, helper for disequality
Twist            i                      child, helper for disequality
Opt / Feas       -                      child
Scale            c (>= 0)               child
AddConst         c                      child
===============  =====================  ==================================
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction

from . import express as ex
from .core import INF, Language, WeightedRelation, add_constant, ext, feas, format_value, opt, scale
from .catalog import gamma_col, rho_eq, rho_subdomain

KINDS = (
    "Base", "Unary", "Zero", "Equality", "AddUnary", "AddBinary", "Minimise", "Join",
    "RestrictDomain", "Pin", "EqRestrict", "NeqRestrict", "Twist", "Opt", "Feas", "Scale", "AddConst",
)

_ARITY = {
    "Base": 0, "Unary": 0, "Zero": 0, "Equality": 0, "AddUnary": 2, "AddBinary": 2, "Minimise": 1,
    "Join": 2, "RestrictDomain": 2, "Pin": 2, "EqRestrict": 1, "NeqRestrict": 2, "Twist": 2,
    "Opt": 1, "Feas": 1, "Scale": 1, "AddConst": 1,
}


class DerivationError(ValueError):
    pass


def _freeze(value):
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    if isinstance(value, (Fraction, str, int)) or value is INF:
        return value
    raise TypeError(f"unsupported parameter value {value!r}")


@dataclass(frozen=True)
class Derivation:
    kind: str
    params: tuple = ()  # sorted (key, value) pairs
    children: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DerivationError(f"unknown derivation kind {self.kind!r}")
        params = self.params.items() if isinstance(self.params, dict) else self.params
        object.__setattr__(self, "params", tuple(sorted((k, _freeze(v)) for k, v in params)))
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) != _ARITY[self.kind]:
            raise DerivationError(f"{self.kind} takes {_ARITY[self.kind]} children, got {len(self.children)}")

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.kind, self.params, self.children))

    @property
    def p(self) -> dict:
        return dict(self.params)

    def __getitem__(self, key):
        return self.p[key]

    # structural helpers

    def depth(self) -> int:
        return self._depth

    def size(self) -> int:
        return self._size

    @cached_property
    def _depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)

    @cached_property
    def _size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    @cached_property
    def _dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def order_key(self) -> tuple:
        """Smaller trees first, then the serialisation; used for deterministic tie-breaks."""
        return (self.size(), self.dumps())

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.params:
            out["params"] = {k: _json_value(v) for k, v in self.params}
        if self.children:
            out["children"] = [c.to_json() for c in self.children]
        return out

    def dumps(self) -> str:
        return self._dumps

    @classmethod
    def from_json(cls, data: dict) -> "Derivation":
        kind = data["kind"]
        params = {k: _param_from_json(k, v) for k, v in data.get("params", {}).items()}
        return cls(kind, params, tuple(cls.from_json(c) for c in data.get("children", [])))

    def __repr__(self) -> str:
        return f"Derivation({self.dumps()})"


def _json_value(v):
    if isinstance(v, Fraction) or v is INF:
        return format_value(v)
    if isinstance(v, tuple):
        return [_json_value(x) for x in v]
    return v


def _param_from_json(key, v):
    if key in ("c",):
        return ext(v)
    if key == "table":
        return tuple(ext(x) for x in v)
    if isinstance(v, list):
        return tuple(v)
    return v


# --------------------------------------------------------------------------
# constructors


def base(name: str) -> Derivation:
    return Derivation("Base", {"name": name})


def unary(table) -> Derivation:
    return Derivation("Unary", {"table": tuple(ext(v) for v in table)})


def unary_of(rel: WeightedRelation) -> Derivation:
    if rel.arity != 1:
        raise DerivationError("Unary leaves hold unary relations")
    return unary(rel.table)


def zero(arity: int) -> Derivation:
    return Derivation("Zero", {"arity": arity})


def equality() -> Derivation:
    return Derivation("Equality")


def add_unary(child, mu, i) -> Derivation:
    return Derivation("AddUnary", {"i": i}, (child, mu))


def add_binary(child, beta, i) -> Derivation:
    return Derivation("AddBinary", {"i": i}, (child, beta))


def minimise(child, i) -> Derivation:
    return Derivation("Minimise", {"i": i}, (child,))


def join(left, right, z1=2, z2=1) -> Derivation:
    return Derivation("Join", {"z1": z1, "z2": z2}, (left, right))


def transpose(child) -> Derivation:
    """Swap the two coordinates of a binary relation by joining with equality."""
    return join(child, equality(), z1=1, z2=1)


def restrict_domain(child, subdomain, i, helper) -> Derivation:
    return Derivation("RestrictDomain", {"i": i, "subdomain": tuple(sorted(set(subdomain)))}, (child, helper))


def pin(child, a, i, helper) -> Derivation:
    return Derivation("Pin", {"i": i, "a": a}, (child, helper))


def eq_restrict(child, i) -> Derivation:
    return Derivation("EqRestrict", {"i": i}, (child,))


def neq_restrict(child, i, helper) -> Derivation:
    return Derivation("NeqRestrict", {"i": i}, (child, helper))


def twist(child, i, helper) -> Derivation:
    return Derivation("Twist", {"i": i}, (child, helper))


def opt_of(child) -> Derivation:
    return Derivation("Opt", (), (child,))


def feas_of(child) -> Derivation:
    return Derivation("Feas", (), (child,))


def scaled(child, c) -> Derivation:
    c = ext(c)
    if c == 1:
        return child
    return Derivation("Scale", {"c": c}, (child,))


def shifted(child, c) -> Derivation:
    c = ext(c)
    if c == 0:
        return child
    return Derivation("AddConst", {"c": c}, (child,))


# --------------------------------------------------------------------------
# semantics


def evaluate(d: Derivation, language: Language, _memo=None, check: bool = False,
             allow_unary: bool = True) -> WeightedRelation:
    """Exact table semantics of ``d`` over ``language``."""
    memo = {} if _memo is None else _memo
    if d in memo:
        return memo[d]
    D = language.domain_size
    k, p = d.kind, d.p

    def ev(c):
        return evaluate(c, language, memo, check, allow_unary)

    if k == "Base":
        try:
            out = language[p["name"]]
        except KeyError:
            raise DerivationError(f"base relation {p['name']!r} not in the language") from None
    elif k == "Unary":
        if not allow_unary:
            raise DerivationError("free unary leaves are not allowed here")
        out = WeightedRelation(D, 1, p["table"])
    elif k == "Zero":
        out = WeightedRelation.constant(D, p["arity"], 0)
    elif k == "Equality":
        out = rho_eq(D)
    elif k == "AddUnary":
        out = ex.add_unary(ev(d.children[0]), ev(d.children[1]), p["i"])
    elif k == "AddBinary":
        out = ex.add_binary(ev(d.children[0]), ev(d.children[1]), p["i"])
    elif k == "Minimise":
        out = ex.minimise(ev(d.children[0]), p["i"])
    elif k == "Join":
        out = ex.join(ev(d.children[0]), ev(d.children[1]), p["z1"], p["z2"])
    elif k == "RestrictDomain":
        _expect(ev(d.children[1]), rho_subdomain(D, p["subdomain"]), d, check)
        out = ex.restrict_domain(ev(d.children[0]), p["subdomain"], p["i"])
    elif k == "Pin":
        _expect(ev(d.children[1]), rho_subdomain(D, [p["a"]]), d, check)
        out = ex.pin(ev(d.children[0]), p["a"], p["i"])
    elif k == "EqRestrict":
        out = ex.eq_restrict(ev(d.children[0]), p["i"])
    elif k == "NeqRestrict":
        _expect(ev(d.children[1]), gamma_col(D), d, check)
        out = ex.neq_restrict(ev(d.children[0]), p["i"])
    elif k == "Twist":
        _expect(ev(d.children[1]), gamma_col(D), d, check)
        out = ex.twist(ev(d.children[0]), p["i"])
    elif k == "Opt":
        out = opt(ev(d.children[0]))
    elif k == "Feas":
        out = feas(ev(d.children[0]))
    elif k == "Scale":
        out = scale(ev(d.children[0]), p["c"])
    elif k == "AddConst":
        out = add_constant(ev(d.children[0]), p["c"])
    else:  # pragma: no cover - guarded by the constructor
        raise DerivationError(k)
    memo[d] = out
    return out


def _expect(got: WeightedRelation, want: WeightedRelation, node: Derivation, check: bool) -> None:
    if check and got != want:
        raise DerivationError(f"helper of {node.kind} evaluates to {got!r}, expected {want!r}")


def replay(d: Derivation, language: Language, allow_unary: bool = True) -> WeightedRelation:
    """Evaluate with helper checks; raises :class:`DerivationError` on any mismatch."""
    return evaluate(d, language, check=True, allow_unary=allow_unary)


def replays_to(d: Derivation, language: Language, target: WeightedRelation, allow_unary: bool = True) -> bool:
    try:
        return replay(d, language, allow_unary) == target
    except DerivationError:
        return False


def uses_unary_leaves(d: Derivation) -> bool:
    return d.kind == "Unary" or any(uses_unary_leaves(c) for c in d.children)


def derivation_arity(d: Derivation, language: Language) -> int:
    return evaluate(d, language).arity
