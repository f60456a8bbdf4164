"""Binary classifiers over a finite universe and the combinatorics on them.

A classifier is stored as an integer bitset whose most significant bit is
individual 0, so integer order coincides with lexicographic order of the
bitstring ("00101" has index 0 leftmost).  All costs are exact rationals and
every square-root threshold is decided by squared integer arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator, NamedTuple

from .errors import DimensionError, DomainError, EmptyMergeError

Rational = Fraction | int


@dataclass(frozen=True)
class Universe:
    """The individuals ``0..n-1`` in canonical order."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise DomainError(f"universe needs n >= 2, got {self.n!r}")

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def pairs(self) -> int:
        return math.comb(self.n, 2)

    def classifiers(self) -> Iterator[Classifier]:
        """All 2^n classifiers in lexicographic order."""
        for value in range(self.size):
            yield Classifier(self.n, value)

    def zeros(self) -> Classifier:
        return Classifier(self.n, 0)

    def ones(self) -> Classifier:
        return Classifier(self.n, self.size - 1)


@dataclass(frozen=True, order=True)
class Classifier:
    """A length-``n`` bit vector, equivalently a two-sided partition."""

    n: int
    value: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("classifier needs at least one individual")
        if not 0 <= self.value < (1 << self.n):
            raise DomainError(f"value {self.value} does not fit in {self.n} bits")

    @classmethod
    def from_string(cls, s: str) -> Classifier:
        if not s or any(ch not in "01" for ch in s):
            raise DomainError(f"not a bitstring: {s!r}")
        return cls(len(s), int(s, 2))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> Classifier:
        bits = list(bits)
        if any(b not in (0, 1) for b in bits):
            raise DomainError("bits must be 0 or 1")
        return cls.from_string("".join(map(str, bits)))

    @classmethod
    def from_ones(cls, n: int, ones: Iterable[int]) -> Classifier:
        """Classifier whose ones side is exactly ``ones``."""
        value = 0
        for i in ones:
            if not 0 <= i < n:
                raise DomainError(f"index {i} outside universe of size {n}")
            value |= 1 << (n - 1 - i)
        return cls(n, value)

    def __str__(self) -> str:
        return format(self.value, f"0{self.n}b")

    def __repr__(self) -> str:
        return f"Classifier('{self}')"

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.value >> (self.n - 1 - i)) & 1

    def __len__(self) -> int:
        return self.n

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(int(ch) for ch in str(self))

    @property
    def mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def ones_mask(self) -> int:
        return self.value

    @property
    def zeros_mask(self) -> int:
        return ~self.value & self.mask

    @property
    def ones_side(self) -> frozenset[int]:
        return frozenset(i for i, b in enumerate(self.bits) if b)

    @property
    def zeros_side(self) -> frozenset[int]:
        return frozenset(i for i, b in enumerate(self.bits) if not b)

    @property
    def n_ones(self) -> int:
        return self.value.bit_count()

    @property
    def n_zeros(self) -> int:
        return self.n - self.n_ones

    @property
    def is_constant(self) -> bool:
        return self.value in (0, self.mask)

    def flip(self) -> Classifier:
        return Classifier(self.n, self.zeros_mask)

    def canonical(self) -> Classifier:
        """The lexicographically smaller of this classifier and its flip."""
        return min(self, self.flip())


def flip(c: Classifier) -> Classifier:
    return c.flip()


def _check_same(u: Classifier, v: Classifier) -> None:
    if u.n != v.n:
        raise DimensionError(f"universe mismatch: {u.n} vs {v.n}")


def hamming(u: Classifier, v: Classifier) -> int:
    _check_same(u, v)
    return (u.value ^ v.value).bit_count()


class QuadrantSizes(NamedTuple):
    g00: int
    g01: int
    g10: int
    g11: int


class Quadrants(NamedTuple):
    """Index sets of the ordered pair ``(u, v)`` keyed by ``(u_i, v_i)``."""

    g00: frozenset[int]
    g01: frozenset[int]
    g10: frozenset[int]
    g11: frozenset[int]

    @property
    def sizes(self) -> QuadrantSizes:
        return QuadrantSizes(len(self.g00), len(self.g01), len(self.g10), len(self.g11))


def quadrant_sizes(u: Classifier, v: Classifier) -> QuadrantSizes:
    _check_same(u, v)
    uz, uo, vz, vo = u.zeros_mask, u.ones_mask, v.zeros_mask, v.ones_mask
    return QuadrantSizes(
        (uz & vz).bit_count(),
        (uz & vo).bit_count(),
        (uo & vz).bit_count(),
        (uo & vo).bit_count(),
    )


def quadrants(u: Classifier, v: Classifier) -> Quadrants:
    _check_same(u, v)
    sets: dict[tuple[int, int], set[int]] = {(a, b): set() for a in (0, 1) for b in (0, 1)}
    for i, (a, b) in enumerate(zip(u.bits, v.bits)):
        sets[a, b].add(i)
    return Quadrants(*(frozenset(sets[k]) for k in ((0, 0), (0, 1), (1, 0), (1, 1))))


@dataclass(frozen=True)
class PairCost:
    """``broken`` unordered pairs out of ``pairs = C(n, 2)``."""

    broken: int
    pairs: int

    def __post_init__(self):
        if self.pairs < 1 or not 0 <= self.broken <= self.pairs:
            raise DomainError(f"invalid pair cost {self.broken}/{self.pairs}")

    @property
    def value(self) -> Fraction:
        return Fraction(self.broken, self.pairs)

    def __float__(self) -> float:
        return self.broken / self.pairs

    def __str__(self) -> str:
        return f"{self.broken}/{self.pairs}"


def _pairs(n: int) -> int:
    if n < 2:
        raise DomainError("pair costs need n >= 2")
    return math.comb(n, 2)


def transport_cost(t: Classifier, c: Classifier) -> PairCost:
    """Pairs monochromatic in ``t`` but split in ``c``."""
    g = quadrant_sizes(t, c)
    return PairCost(g.g00 * g.g01 + g.g10 * g.g11, _pairs(t.n))


def symmetric_cost(u: Classifier, v: Classifier) -> PairCost:
    """Pairs whose sameness status differs between ``u`` and ``v``.

    Computed from the quadrant sizes: a pair is monochromatic in exactly one
    classifier iff its endpoints share a row but not a column of the 2x2
    quadrant table, or a column but not a row.
    """
    g = quadrant_sizes(u, v)
    broken = g.g00 * g.g01 + g.g10 * g.g11 + g.g00 * g.g10 + g.g01 * g.g11
    return PairCost(broken, _pairs(u.n))


def _as_fraction(delta: Rational) -> Fraction:
    d = Fraction(delta)
    if d < 0:
        raise DomainError(f"delta must be non-negative, got {delta}")
    return d


def exceeds_sqrt(count: int, factor: Rational, delta: Rational, n: int) -> bool:
    """``count > sqrt(factor * delta) * n``, decided exactly."""
    return count * count > Fraction(factor) * _as_fraction(delta) * n * n


def within_sqrt(count: int, factor: Rational, delta: Rational, n: int) -> bool:
    """``count <= sqrt(factor * delta) * n``, decided exactly."""
    return not exceeds_sqrt(count, factor, delta, n)


def is_faithful(c: Classifier, t: Classifier, delta: Rational) -> bool:
    return transport_cost(t, c).value <= _as_fraction(delta)


def is_balanced(c: Classifier, delta: Rational) -> bool:
    return exceeds_sqrt(c.n_zeros, 2, delta, c.n) and exceeds_sqrt(c.n_ones, 2, delta, c.n)


def in_close_alignment(p: Classifier, q: Classifier, delta: Rational) -> bool:
    g = quadrant_sizes(p, q)
    half = Fraction(1, 2)
    # p^0 & q^1 is g01, q^0 & p^1 is g10
    return within_sqrt(g.g01, half, delta, p.n) and within_sqrt(g.g10, half, delta, p.n)


def _merge(cs: Iterable[Classifier], ones: bool) -> Classifier:
    cs = list(cs)
    if not cs:
        raise EmptyMergeError("merge of an empty set of classifiers")
    first = cs[0]
    for c in cs[1:]:
        _check_same(first, c)
    if ones:
        return Classifier(first.n, reduce(lambda a, b: a | b, (c.value for c in cs)))
    zeros = reduce(lambda a, b: a | b, (c.zeros_mask for c in cs))
    return Classifier(first.n, ~zeros & first.mask)


def merge_ones(cs: Iterable[Classifier]) -> Classifier:
    """Union of ones sides; everything else goes to the zeros side."""
    return _merge(cs, ones=True)


def merge_zeros(cs: Iterable[Classifier]) -> Classifier:
    """Union of zeros sides; everything else goes to the ones side."""
    return _merge(cs, ones=False)


def misplit_fraction(tau: float, delta: float) -> float:
    """Fraction of same-group pairs a recovered classifier may split.

    Evaluates the two error products with the second factor's sign taken as
    ``+``; the result equals ``delta`` for ``tau`` in
    ``[sqrt(2 delta), 1 - sqrt(2 delta)]``.
    """
    tau_c = 1.0 - tau
    r = math.sqrt(max(tau * tau - 2 * delta, 0.0))
    rc = math.sqrt(max(tau_c * tau_c - 2 * delta, 0.0))
    return ((tau - r) / 2) * ((tau + r) / 2) + ((tau_c - rc) / 2) * ((tau_c + rc) / 2)
