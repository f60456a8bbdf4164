"""Coarse {0,1} metrics and their amplification into graded metrics.

A classifier induces the pseudometric that puts individuals with the same
decision at distance 0 and all others at distance 1.  A graded metric ``d``
with values in [0, 1] is approximated by ``k`` such coarse relations, level
``i`` marking the pairs with ``d > i / k``; counting the marked levels and
dividing by ``k`` recovers ``d`` to within ``1 / k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .classifier import Classifier
from .errors import ConsistencyError, DomainError

Matrix = list[list[Fraction]]


@dataclass(frozen=True)
class CoarseMetric:
    partition: Classifier

    def __post_init__(self):
        object.__setattr__(self, "partition", self.partition.canonical())

    @property
    def n(self) -> int:
        return self.partition.n

    def lookup(self, u: int, v: int) -> int:
        return int(self.partition[u] != self.partition[v])

    def matrix(self) -> list[list[int]]:
        return [[self.lookup(u, v) for v in range(self.n)] for u in range(self.n)]


def coarse_metric(c: Classifier) -> CoarseMetric:
    return CoarseMetric(c)


def as_matrix(d: Sequence[Sequence]) -> Matrix:
    """Validate ``d`` as a symmetric [0, 1] matrix with zero diagonal."""
    m = [[Fraction(x) for x in row] for row in d]
    n = len(m)
    if any(len(row) != n for row in m):
        raise DomainError("metric matrix must be square")
    for u in range(n):
        if m[u][u] != 0:
            raise DomainError(f"diagonal entry ({u}, {u}) is {m[u][u]}, must be 0")
        for v in range(n):
            if not 0 <= m[u][v] <= 1:
                raise DomainError(f"entry ({u}, {v}) = {m[u][v]} outside [0, 1]")
            if m[u][v] != m[v][u]:
                raise DomainError(f"matrix not symmetric at ({u}, {v})")
    return m


def _partition_of(rel: Sequence[Sequence[int]]) -> Classifier | None:
    """The two-class partition realising ``rel``, if there is one."""
    n = len(rel)
    if n < 1:
        return None
    bits = [rel[0][v] for v in range(n)]
    for u in range(n):
        for v in range(n):
            if rel[u][v] != int(bits[u] != bits[v]):
                return None
    return Classifier.from_bits(bits)


@dataclass(frozen=True)
class ThresholdStack:
    """Level ``i`` (1-based) is the 0/1 relation ``d > i / k``."""

    k: int
    levels: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        if self.k < 1 or len(self.levels) != self.k:
            raise DomainError(f"stack of {len(self.levels)} levels does not match k={self.k}")

    @property
    def n(self) -> int:
        return len(self.levels[0])

    def threshold(self, i: int) -> Fraction:
        return Fraction(i, self.k)

    def level_metric(self, i: int) -> CoarseMetric | None:
        """Level ``i`` as a coarse metric, or None if it is not two-class."""
        p = _partition_of(self.levels[i - 1])
        return None if p is None else CoarseMetric(p)

    def partition_consistent(self) -> list[bool]:
        return [_partition_of(level) is not None for level in self.levels]

    def is_monotone(self) -> bool:
        for hi in range(1, self.k):
            lower, upper = self.levels[hi - 1], self.levels[hi]
            if any(upper[u][v] and not lower[u][v] for u in range(self.n) for v in range(self.n)):
                return False
        return True


def threshold_family(d: Sequence[Sequence], k: int) -> ThresholdStack:
    if k < 1:
        raise DomainError("k must be positive")
    m = as_matrix(d)
    n = len(m)
    levels = tuple(
        tuple(tuple(int(m[u][v] > Fraction(i, k)) for v in range(n)) for u in range(n))
        for i in range(1, k + 1)
    )
    return ThresholdStack(k, levels)


def combine_thresholds(stack: ThresholdStack) -> Matrix:
    """Fraction of levels reporting distance 1, per pair."""
    if not stack.is_monotone():
        raise ConsistencyError("threshold stack is not monotone")
    n = stack.n
    return [
        [Fraction(sum(level[u][v] for level in stack.levels), stack.k) for v in range(n)]
        for u in range(n)
    ]


def to_triangular(m: Sequence[Sequence]) -> list[list[str]]:
    """Strict upper triangle as rows of ``"p/q"`` strings."""
    n = len(m)
    out = []
    for u in range(n - 1):
        row = []
        for v in range(u + 1, n):
            x = Fraction(m[u][v])
            row.append(f"{x.numerator}/{x.denominator}")
        out.append(row)
    return out


def from_triangular(rows: Sequence[Sequence[str]]) -> Matrix:
    n = len(rows) + 1
    m = [[Fraction(0)] * n for _ in range(n)]
    for u, row in enumerate(rows):
        if len(row) != n - 1 - u:
            raise DomainError(f"triangular row {u} has {len(row)} entries, expected {n - 1 - u}")
        for off, text in enumerate(row):
            v = u + 1 + off
            m[u][v] = m[v][u] = Fraction(text)
    return as_matrix(m)
