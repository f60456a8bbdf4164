"""Shared fixtures and brute-force reference helpers.

The helpers here recompute quantities straight from their definitions,
pair by pair or index by index, so tests never check the package against
itself.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product

import pytest

from fairextract import Classifier, GrayPolicy, OracleSpec

WORKED_T = ("00001111", "00110011")
WORKED_DELTA = Fraction(1, 200)


def bits(s: str) -> Classifier:
    return Classifier.from_string(s)


def all_strings(n: int) -> list[str]:
    return ["".join(p) for p in product("01", repeat=n)]


def brute_transport(t: str, c: str) -> Fraction:
    """Unordered pairs with equal labels in ``t`` and different labels in ``c``."""
    n = len(t)
    broken = sum(1 for i, j in combinations(range(n), 2) if t[i] == t[j] and c[i] != c[j])
    return Fraction(broken, n * (n - 1) // 2)


def brute_symmetric(u: str, v: str) -> Fraction:
    n = len(u)
    differ = sum(1 for i, j in combinations(range(n), 2) if (u[i] == u[j]) != (v[i] == v[j]))
    return Fraction(differ, n * (n - 1) // 2)


def brute_hamming(u: str, v: str) -> int:
    return sum(a != b for a, b in zip(u, v))


def worked_spec(policy: str = "reject-all", kind: str = "transport") -> OracleSpec:
    return OracleSpec(
        n=8,
        truth=tuple(bits(s) for s in WORKED_T),
        delta=WORKED_DELTA,
        distance_kind=kind,
        gray_policy=GrayPolicy(policy),
        enforce_flip_rejection=True,
    )


@pytest.fixture
def worked():
    return worked_spec()
