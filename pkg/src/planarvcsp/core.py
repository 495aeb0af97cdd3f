"""Extended rationals, weighted relations, operations and multimorphism checks.

Every value is either a :class:`fractions.Fraction` or the singleton :data:`INF`.
Tables are dense tuples indexed lexicographically, coordinate 1 most
significant, so ``itertools.product(range(d), repeat=r)`` enumerates them in
index order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration would exceed its configured work budget."""


class _Infinity:
    """Positive infinity over the rationals. There is no negative counterpart."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __reduce__(self):
        return (_Infinity, ())

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __add__(self, other):
        if other is self or isinstance(other, (int, Fraction)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self
        raise ArithmeticError("inf - inf is undefined")

    def __rsub__(self, other):
        raise ArithmeticError("negative infinity does not exist")

    def __mul__(self, c):
        if isinstance(c, (int, Fraction)):
            if c < 0:
                raise ArithmeticError("negative multiple of inf")
            return self  # 0 * inf = inf
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        raise ArithmeticError("negative infinity does not exist")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("planarvcsp.INF")


INF = _Infinity()

ExtValue = "Fraction | _Infinity"


def ext(value) -> Fraction | _Infinity:
    """Coerce ints, Fractions, ``"p/q"`` strings, ``"inf"`` and float inf."""
    if value is INF:
        return INF
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not values")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        s = value.strip().lower()
        if s in ("inf", "infinity", "+inf"):
            return INF
        return Fraction(s)
    if isinstance(value, float):
        if value == float("inf"):
            return INF
        raise TypeError("floating point values are not accepted; use 'p/q' strings")
    raise TypeError(f"cannot interpret {value!r} as an extended rational")


def is_finite(value) -> bool:
    return value is not INF


def format_value(value) -> str:
    if value is INF:
        return "inf"
    return f"{value.numerator}/{value.denominator}"


# --------------------------------------------------------------------------
# weighted relations


@dataclass(frozen=True)
class WeightedRelation:
    domain_size: int
    arity: int
    table: tuple

    def __post_init__(self):
        if self.domain_size < 1:
            raise ValueError("domain_size must be positive")
        if self.arity < 1:
            raise ValueError("arity must be at least 1")
        table = tuple(ext(v) for v in self.table)
        if len(table) != self.domain_size ** self.arity:
            raise ValueError(
                f"table has {len(table)} entries, expected {self.domain_size}^{self.arity}"
            )
        object.__setattr__(self, "table", table)

    # construction helpers

    @classmethod
    def trusted(cls, domain_size: int, arity: int, table: tuple) -> "WeightedRelation":
        """Build without coercing entries; ``table`` must already hold Fractions and INF."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "domain_size", domain_size)
        object.__setattr__(obj, "arity", arity)
        object.__setattr__(obj, "table", tuple(table))
        return obj

    @classmethod
    def from_function(cls, domain_size: int, arity: int, fn: Callable) -> "WeightedRelation":
        return cls(domain_size, arity, tuple(fn(*t) for t in all_tuples(domain_size, arity)))

    @classmethod
    def crisp(cls, domain_size: int, arity: int, tuples: Iterable[Sequence[int]]) -> "WeightedRelation":
        allowed = {tuple(t) for t in tuples}
        for t in allowed:
            _check_tuple(domain_size, arity, t)
        return cls.from_function(domain_size, arity, lambda *t: 0 if t in allowed else INF)

    @classmethod
    def constant(cls, domain_size: int, arity: int, value) -> "WeightedRelation":
        return cls(domain_size, arity, (ext(value),) * domain_size ** arity)

    # access

    def index(self, t: Sequence[int]) -> int:
        _check_tuple(self.domain_size, self.arity, t)
        idx = 0
        for a in t:
            idx = idx * self.domain_size + a
        return idx

    def __call__(self, *t):
        return self.table[self.index(t)]

    def value(self, t: Sequence[int]):
        return self.table[self.index(t)]

    def tuples(self) -> Iterator[tuple]:
        return all_tuples(self.domain_size, self.arity)

    def items(self) -> Iterator[tuple]:
        return zip(self.tuples(), self.table)

    def feasible_tuples(self) -> list[tuple]:
        return [t for t, v in self.items() if v is not INF]

    def support(self) -> frozenset:
        return frozenset(self.feasible_tuples())

    @property
    def is_crisp(self) -> bool:
        return all(v is INF or v == 0 for v in self.table)

    @property
    def is_empty(self) -> bool:
        return all(v is INF for v in self.table)

    def finite_values(self) -> list[Fraction]:
        return sorted({v for v in self.table if v is not INF})

    def min_value(self):
        return min(self.table)

    def __repr__(self) -> str:
        if self.is_crisp:
            body = sorted(self.feasible_tuples())
            return f"WeightedRelation(d={self.domain_size}, r={self.arity}, crisp={body})"
        vals = ", ".join(format_value(v) for v in self.table)
        return f"WeightedRelation(d={self.domain_size}, r={self.arity}, [{vals}])"


def all_tuples(domain_size: int, arity: int) -> Iterator[tuple]:
    return itertools.product(range(domain_size), repeat=arity)


def _check_tuple(domain_size: int, arity: int, t: Sequence[int]) -> None:
    if len(t) != arity:
        raise ValueError(f"tuple {tuple(t)} has length {len(t)}, expected arity {arity}")
    for a in t:
        if not (isinstance(a, int) and 0 <= a < domain_size):
            raise ValueError(f"label {a!r} outside domain of size {domain_size}")


def evaluate(gamma: WeightedRelation, t: Sequence[int]):
    return gamma.value(t)


def feas(gamma: WeightedRelation) -> WeightedRelation:
    return WeightedRelation(
        gamma.domain_size, gamma.arity, tuple(INF if v is INF else Fraction(0) for v in gamma.table)
    )


def opt(gamma: WeightedRelation) -> WeightedRelation:
    """Crisp relation of minimum-value tuples (all-INF when nothing is feasible)."""
    m = gamma.min_value()
    if m is INF:
        return gamma if gamma.is_crisp else feas(gamma)
    return WeightedRelation(
        gamma.domain_size, gamma.arity, tuple(Fraction(0) if v == m else INF for v in gamma.table)
    )


def scale(gamma: WeightedRelation, c) -> WeightedRelation:
    c = ext(c)
    if c is INF or c < 0:
        raise ValueError("scaling factor must be a non-negative rational")
    return WeightedRelation(gamma.domain_size, gamma.arity, tuple(c * v for v in gamma.table))


def add_constant(gamma: WeightedRelation, c) -> WeightedRelation:
    c = ext(c)
    if c is INF:
        raise ValueError("constant must be finite")
    return WeightedRelation(gamma.domain_size, gamma.arity, tuple(v + c for v in gamma.table))


def add_relations(a: WeightedRelation, b: WeightedRelation) -> WeightedRelation:
    """Pointwise sum of two relations of the same shape."""
    if (a.domain_size, a.arity) != (b.domain_size, b.arity):
        raise ValueError("shape mismatch")
    return WeightedRelation(a.domain_size, a.arity, tuple(x + y for x, y in zip(a.table, b.table)))


# --------------------------------------------------------------------------
# languages


@dataclass(frozen=True)
class Language:
    domain_size: int
    relations: tuple  # of (name, WeightedRelation), order preserved

    def __post_init__(self):
        rels = tuple((str(n), g) for n, g in (self.relations.items() if isinstance(self.relations, dict) else self.relations))
        if not rels:
            raise ValueError("a language needs at least one relation")
        names = [n for n, _ in rels]
        if len(set(names)) != len(names):
            raise ValueError("relation names must be unique")
        for n, g in rels:
            if g.domain_size != self.domain_size:
                raise ValueError(f"relation {n!r} has domain size {g.domain_size}")
        object.__setattr__(self, "relations", rels)

    @classmethod
    def of(cls, **relations: WeightedRelation) -> "Language":
        first = next(iter(relations.values()))
        return cls(first.domain_size, tuple(relations.items()))

    def __getitem__(self, name: str) -> WeightedRelation:
        for n, g in self.relations:
            if n == name:
                return g
        raise KeyError(name)

    def __iter__(self):
        return iter(self.relations)

    def __len__(self):
        return len(self.relations)

    def names(self) -> list[str]:
        return [n for n, _ in self.relations]

    def union(self, other: "Language") -> "Language":
        merged = dict(self.relations)
        for n, g in other.relations:
            if n in merged and merged[n] != g:
                raise ValueError(f"conflicting definitions of {n!r}")
            merged[n] = g
        return Language(self.domain_size, tuple(merged.items()))

    @property
    def max_arity(self) -> int:
        return max(g.arity for _, g in self.relations)


# --------------------------------------------------------------------------
# operations


@dataclass(frozen=True)
class OpTable:
    domain_size: int
    arity: int
    table: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        table = tuple(int(v) for v in self.table)
        if len(table) != self.domain_size ** self.arity:
            raise ValueError("operation table has the wrong length")
        if any(not 0 <= v < self.domain_size for v in table):
            raise ValueError("operation value outside the domain")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_function(cls, domain_size: int, arity: int, fn: Callable, name: str = "") -> "OpTable":
        return cls(domain_size, arity, tuple(fn(*t) for t in all_tuples(domain_size, arity)), name)

    def __call__(self, *args: int) -> int:
        idx = 0
        for a in args:
            idx = idx * self.domain_size + a
        return self.table[idx]

    @property
    def is_conservative(self) -> bool:
        return all(v in t for t, v in zip(all_tuples(self.domain_size, self.arity), self.table))


def projection(domain_size: int, k: int, i: int) -> OpTable:
    """The k-ary projection onto argument i (1-based)."""
    if not 1 <= i <= k:
        raise ValueError("projection index out of range")
    return OpTable.from_function(domain_size, k, lambda *xs: xs[i - 1], name=f"e{k}_{i}")


def apply_componentwise(f: OpTable, tuples: Sequence[Sequence[int]]) -> tuple:
    if len(tuples) != f.arity:
        raise ValueError(f"operation of arity {f.arity} applied to {len(tuples)} tuples")
    lengths = {len(t) for t in tuples}
    if len(lengths) > 1:
        raise ValueError("tuples of different lengths")
    return tuple(f(*column) for column in zip(*tuples))


@dataclass(frozen=True)
class MultimorphismCandidate:
    ops: tuple
    name: str = ""

    def __post_init__(self):
        ops = tuple(self.ops)
        k = len(ops)
        if k == 0:
            raise ValueError("empty candidate")
        if any(f.arity != k for f in ops):
            raise ValueError("a k-ary multimorphism needs k operations of arity k")
        if len({f.domain_size for f in ops}) != 1:
            raise ValueError("operations disagree on the domain")
        object.__setattr__(self, "ops", ops)

    @property
    def k(self) -> int:
        return len(self.ops)

    @property
    def domain_size(self) -> int:
        return self.ops[0].domain_size

    def apply(self, tuples: Sequence[Sequence[int]]) -> list[tuple]:
        return [apply_componentwise(f, tuples) for f in self.ops]


@dataclass(frozen=True)
class Verdict:
    """Outcome of a polymorphism or multimorphism check.

    ``status`` is one of ``"holds"``, ``"holds_with_equality"``, ``"fails"``.
    On failure ``relation`` names the offending relation and ``witness`` holds
    the input tuples (lexicographically first violation).
    """

    status: str
    relation: str | None = None
    witness: tuple | None = None
    reason: str = ""

    @property
    def holds(self) -> bool:
        return self.status != "fails"

    def __bool__(self) -> bool:
        return self.holds


DEFAULT_MM_BUDGET = 10 ** 8


def _as_items(gammas) -> list[tuple[str, WeightedRelation]]:
    if isinstance(gammas, WeightedRelation):
        return [("gamma", gammas)]
    if isinstance(gammas, Language):
        return list(gammas.relations)
    if isinstance(gammas, dict):
        return list(gammas.items())
    return [(f"gamma{i}", g) for i, g in enumerate(gammas)]


def is_polymorphism(f: OpTable, gammas, budget: int = DEFAULT_MM_BUDGET) -> Verdict:
    items = _as_items(gammas)
    _charge(items, f.arity, budget)
    for name, g in items:
        _check_domain(g, f.domain_size)
        fs = g.feasible_tuples()
        for xs in itertools.product(fs, repeat=f.arity):
            if g.value(apply_componentwise(f, xs)) is INF:
                return Verdict("fails", name, tuple(xs), "image infeasible")
    return Verdict("holds")


def is_multimorphism(m: MultimorphismCandidate, gammas, budget: int = DEFAULT_MM_BUDGET) -> Verdict:
    items = _as_items(gammas)
    k = m.k
    _charge(items, k, budget)
    equality = True
    for name, g in items:
        _check_domain(g, m.domain_size)
        fs = g.feasible_tuples()
        vals = {t: g.value(t) for t in fs}
        for xs in itertools.product(fs, repeat=k):
            images = m.apply(xs)
            lhs = Fraction(0)
            for im in images:
                lhs = lhs + g.value(im)
            rhs = sum((vals[x] for x in xs), Fraction(0))
            if lhs is INF:
                return Verdict("fails", name, tuple(xs), "image infeasible")
            if lhs > rhs:
                return Verdict("fails", name, tuple(xs), "inequality violated")
            if lhs != rhs:
                equality = False
    return Verdict("holds_with_equality" if equality else "holds")


def _check_domain(g: WeightedRelation, d: int) -> None:
    if g.domain_size != d:
        raise ValueError(f"relation over domain {g.domain_size}, operation over {d}")


def _charge(items, k: int, budget: int) -> None:
    work = sum(len(g.feasible_tuples()) ** k for _, g in items)
    if work > budget:
        raise BudgetExceeded(f"multimorphism check needs {work} evaluations, budget is {budget}")


# --------------------------------------------------------------------------
# projections and 2-decomposability


def project(rho: WeightedRelation, i: int, j: int) -> WeightedRelation:
    """Binary projection of a crisp relation on coordinates i, j (1-based)."""
    if not rho.is_crisp:
        raise ValueError("projection is defined for crisp relations")
    r = rho.arity
    if not (1 <= i <= r and 1 <= j <= r):
        raise ValueError(f"coordinates ({i}, {j}) out of range for arity {r}")
    pairs = {(t[i - 1], t[j - 1]) for t in rho.feasible_tuples()}
    return WeightedRelation.crisp(rho.domain_size, 2, pairs)


def is_2_decomposable(rho: WeightedRelation) -> Verdict:
    """``holds`` or ``fails`` with the first consistent tuple missing from rho."""
    if not rho.is_crisp:
        raise ValueError("2-decomposability is defined for crisp relations")
    r = rho.arity
    if r <= 2:
        return Verdict("holds")
    proj = {}
    for i in range(r):
        for j in range(r):
            proj[i, j] = {(t[i], t[j]) for t in rho.feasible_tuples()}
    for t in rho.tuples():
        if rho.value(t) is not INF:
            continue
        if all((t[i], t[j]) in proj[i, j] for i in range(r) for j in range(r)):
            return Verdict("fails", witness=(t,), reason="consistent tuple outside relation")
    return Verdict("holds")
