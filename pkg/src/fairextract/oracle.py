"""Deterministic strong and weak fairness oracles.

An :class:`OracleSpec` fully determines an oracle.  Extraction code never
sees the spec; it only receives a :class:`QueryHandle`, which forwards
``(context, classifier)`` queries and counts them.
"""
from __future__ import annotations

import hashlib
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable

from .classifier import (
    Classifier,
    Universe,
    exceeds_sqrt,
    hamming,
    in_close_alignment,
    is_balanced,
    is_faithful,
    quadrant_sizes,
    symmetric_cost,
)
from .errors import DomainError, ResourceError, SpecError, SpecInconsistencyError

DEFAULT_BUDGET = 1 << 16


class DistanceKind(str, Enum):
    STRONG = "strong"
    HAMMING = "hamming"
    TRANSPORT = "transport"
    SYMMETRIC = "symmetric-transport"

    @property
    def is_transport(self) -> bool:
        return self in (DistanceKind.TRANSPORT, DistanceKind.SYMMETRIC)


class GrayKind(str, Enum):
    ACCEPT_ALL = "accept-all"
    REJECT_ALL = "reject-all"
    SEEDED_RANDOM = "seeded-random"
    ADVERSARIAL = "adversarial-flip-favoring"


@dataclass(frozen=True)
class GrayPolicy:
    """How a weak oracle answers in the gray zone.

    ``adversarial-flip-favoring`` accepts a gray classifier exactly when it
    lies nearer (in Hamming distance) to the flip of some truth it is close to
    than to that truth itself, which loads the flip side of every orbit.
    """

    kind: GrayKind = GrayKind.REJECT_ALL
    accept_probability: Fraction = Fraction(1, 2)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", GrayKind(self.kind))
        p = Fraction(self.accept_probability)
        if not 0 <= p <= 1:
            raise SpecError(f"accept_probability must lie in [0, 1], got {p}")
        object.__setattr__(self, "accept_probability", p)
        if not 0 <= self.seed < 1 << 64:
            raise SpecError("gray policy seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class OracleSpec:
    n: int
    truth: tuple[Classifier, ...]
    delta: Fraction
    distance_kind: DistanceKind
    context_count: int = 1
    accepting_contexts: tuple[frozenset[int], ...] = ()
    gray_policy: GrayPolicy = field(default_factory=GrayPolicy)
    enforce_flip_rejection: bool = False

    def __post_init__(self):
        object.__setattr__(self, "distance_kind", DistanceKind(self.distance_kind))
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "truth", tuple(self.truth))
        try:
            Universe(self.n)
        except DomainError as exc:
            raise SpecError(str(exc)) from exc
        if not self.truth:
            raise SpecError("truth set must be non-empty")
        if any(t.n != self.n for t in self.truth):
            raise SpecError("every truth classifier must live on the spec's universe")
        if len(set(self.truth)) != len(self.truth):
            raise SpecError("truth classifiers must be distinct")
        if self.delta < 0:
            raise SpecError("delta must be non-negative")
        if self.distance_kind == DistanceKind.HAMMING and self.delta.denominator != 1:
            raise SpecError("hamming delta is an absolute count and must be an integer")
        if self.distance_kind.is_transport and self.delta > 1:
            raise SpecError("transport delta must lie in [0, 1]")
        if self.context_count < 1:
            raise SpecError("context_count must be positive")
        acc = self.accepting_contexts or tuple(frozenset({0}) for _ in self.truth)
        acc = tuple(frozenset(a) for a in acc)
        if len(acc) != len(self.truth):
            raise SpecError("accepting_contexts must have one entry per truth classifier")
        for i, a in enumerate(acc):
            if not a:
                raise SpecError(f"truth classifier {i} has no accepting context")
            if any(not 0 <= x < self.context_count for x in a):
                raise SpecError(f"truth classifier {i} names a context outside 0..{self.context_count - 1}")
        object.__setattr__(self, "accepting_contexts", acc)
        if self.enforce_flip_rejection and not self.distance_kind.is_transport:
            raise SpecError("enforce_flip_rejection applies to transport distance kinds only")
        conflicts = self.flip_conflicts()
        if conflicts:
            s, f = conflicts[0]
            raise SpecInconsistencyError(
                f"truth classifier {s} is force-rejected: it is in close alignment with {f}, "
                "the flip of a truth classifier whose flip is not in the truth set"
            )

    @property
    def universe(self) -> Universe:
        return Universe(self.n)

    def flips_outside(self) -> list[Classifier]:
        members = set(self.truth)
        return [t.flip() for t in self.truth if t.flip() not in members]

    def flip_conflicts(self) -> list[tuple[Classifier, Classifier]]:
        """Truth members the forced flip rejection would reject."""
        if not self.enforce_flip_rejection:
            return []
        return [
            (s, f)
            for f in self.flips_outside()
            for s in self.truth
            if in_close_alignment(s, f, self.delta)
        ]


def _gray_hash(seed: int, ctx: int, c: Classifier) -> int:
    h = hashlib.blake2b(f"{seed}:{ctx}:{c}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


class Oracle:
    """The deterministic oracle described by an :class:`OracleSpec`."""

    def __init__(self, spec: OracleSpec):
        self.spec = spec
        self._accepting = dict(zip(spec.truth, spec.accepting_contexts))
        self._flips_outside = spec.flips_outside() if spec.enforce_flip_rejection else []

    def strong_accepts(self, ctx: int, c: Classifier) -> bool:
        return ctx in self._accepting.get(c, ())

    def is_close(self, t: Classifier, c: Classifier) -> bool:
        """Whether ``c`` is within ``delta`` of ``t`` under the spec's distance."""
        kind, delta = self.spec.distance_kind, self.spec.delta
        if kind == DistanceKind.HAMMING:
            return hamming(c, t) <= delta
        if kind == DistanceKind.TRANSPORT:
            return is_faithful(c, t, delta)
        if kind == DistanceKind.SYMMETRIC:
            return symmetric_cost(t, c).value <= delta
        return c == t

    def is_far(self, c: Classifier) -> bool:
        return not any(self.is_close(t, c) for t in self.spec.truth)

    def forced_reject(self, c: Classifier) -> bool:
        return any(in_close_alignment(c, f, self.spec.delta) for f in self._flips_outside)

    def _gray(self, ctx: int, c: Classifier) -> bool:
        policy = self.spec.gray_policy
        if policy.kind == GrayKind.ACCEPT_ALL:
            return True
        if policy.kind == GrayKind.REJECT_ALL:
            return False
        if policy.kind == GrayKind.SEEDED_RANDOM:
            p = policy.accept_probability
            return _gray_hash(policy.seed, ctx, c) * p.denominator < p.numerator << 64
        return any(
            self.is_close(t, c) and hamming(c, t.flip()) < hamming(c, t)
            for t in self.spec.truth
        )

    def query(self, ctx: int, c: Classifier) -> bool:
        if not isinstance(ctx, int) or not 0 <= ctx < self.spec.context_count:
            raise DomainError(f"context {ctx!r} outside 0..{self.spec.context_count - 1}")
        if c.n != self.spec.n:
            raise DomainError(f"classifier has {c.n} bits, universe has {self.spec.n}")
        if self.strong_accepts(ctx, c):
            return True
        if self.spec.distance_kind == DistanceKind.STRONG or self.is_far(c):
            return False
        if self.forced_reject(c):
            return False
        return self._gray(ctx, c)


def query(spec: OracleSpec, ctx: int, c: Classifier) -> bool:
    return Oracle(spec).query(ctx, c)


class QueryHandle:
    """Query-only access to an oracle.

    Holds the answering function and nothing else, so extraction cannot read
    the truth set.  Counts queries; safe to share across threads.
    """

    def __init__(self, answer: Callable[[int, Classifier], bool], n: int, context_count: int):
        self._answer = answer
        self.n = n
        self.context_count = context_count
        self._lock = threading.Lock()
        self.query_count = 0

    @classmethod
    def for_spec(cls, spec: OracleSpec) -> QueryHandle:
        return cls(Oracle(spec).query, spec.n, spec.context_count)

    def query(self, ctx: int, c: Classifier) -> bool:
        with self._lock:
            self.query_count += 1
        return self._answer(ctx, c)

    def accepts_somewhere(self, c: Classifier) -> bool:
        return any(self.query(ctx, c) for ctx in range(self.context_count))

    def access_log(self) -> dict:
        return {"interface": "query-only", "query_count": self.query_count}


def check_budget(n: int, budget: int = DEFAULT_BUDGET) -> None:
    required = 1 << n
    if required > budget:
        raise ResourceError(
            f"exhaustive enumeration needs {required} classifiers, budget is {budget}", required
        )


def enumerate_accepted(
    source: QueryHandle | OracleSpec, *, budget: int = DEFAULT_BUDGET, threads: int = 1
) -> list[Classifier]:
    """Classifiers accepted under at least one context, in lexicographic order."""
    handle = QueryHandle.for_spec(source) if isinstance(source, OracleSpec) else source
    n = handle.n
    check_budget(n, budget)
    total = 1 << n

    def scan(bounds: tuple[int, int]) -> list[Classifier]:
        lo, hi = bounds
        return [c for c in (Classifier(n, v) for v in range(lo, hi)) if handle.accepts_somewhere(c)]

    if threads <= 1:
        return scan((0, total))
    step = max(1, -(-total // (threads * 4)))
    chunks = [(lo, min(lo + step, total)) for lo in range(0, total, step)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(scan, chunks))
    return [c for part in parts for c in part]


def neighborhood(t: Classifier, delta, *, budget: int = DEFAULT_BUDGET) -> frozenset[Classifier]:
    """Every classifier delta-faithful to ``t``, by brute force."""
    check_budget(t.n, budget)
    return frozenset(c for c in Universe(t.n).classifiers() if is_faithful(c, t, delta))


@dataclass
class AssumptionReport:
    clause1_ok: bool = True
    clause2_ok: bool = True
    clause3_consistent: bool = True
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "clause1_ok": self.clause1_ok,
            "clause2_ok": self.clause2_ok,
            "clause3_consistent": self.clause3_consistent,
            "violations": list(self.violations),
        }


def check_assumptions(spec: OracleSpec, *, budget: int = DEFAULT_BUDGET) -> AssumptionReport:
    """Check the structural assumptions extraction guarantees rely on.

    Transport kinds get the three-clause check.  For the Hamming kind the only
    requirement is pairwise separation beyond ``4 * delta``; it is reported
    under clause 2.  Strong oracles need nothing.
    """
    report = AssumptionReport()
    kind, delta, n = spec.distance_kind, spec.delta, spec.n
    if kind == DistanceKind.STRONG:
        return report
    if kind == DistanceKind.HAMMING:
        for i, t in enumerate(spec.truth):
            for j in range(i + 1, len(spec.truth)):
                d = hamming(t, spec.truth[j])
                if d <= 4 * delta:
                    report.clause2_ok = False
                    report.violations.append(
                        f"separation: d_H({t}, {spec.truth[j]}) = {d} <= 4*delta = {4 * delta}"
                    )
        return report

    for t in spec.truth:
        if not t.is_constant and not is_balanced(t, 4 * delta):
            report.clause1_ok = False
            report.violations.append(
                f"clause 1: {t} has sides ({t.n_zeros}, {t.n_ones}), not 4*delta-balanced"
            )
    for i, t in enumerate(spec.truth):
        for u in spec.truth[i + 1:]:
            if u == t.flip():
                continue
            g = quadrant_sizes(t, u)
            empty = sum(1 for x in g if x == 0)
            small = [x for x in g if x and not exceeds_sqrt(x, 8, delta, n)]
            if empty > 1 or small:
                report.clause2_ok = False
                report.violations.append(
                    f"clause 2: quadrants of ({t}, {u}) are {tuple(g)}; "
                    f"{empty} empty, non-empty ones must exceed 2*sqrt(2*delta)*n"
                )

    outside = spec.flips_outside()
    if outside:
        if spec.enforce_flip_rejection:
            for s, f in spec.flip_conflicts():
                report.clause3_consistent = False
                report.violations.append(f"clause 3: truth member {s} is close-aligned with {f}")
        else:
            oracle = Oracle(spec)
            check_budget(n, budget)
            for c in Universe(n).classifiers():
                hits = [f for f in outside if in_close_alignment(c, f, delta)]
                if hits and any(oracle.query(ctx, c) for ctx in range(spec.context_count)):
                    report.clause3_consistent = False
                    report.violations.append(
                        f"clause 3: accepted {c} is close-aligned with {hits[0]}, "
                        "a flip outside the truth set"
                    )
                    break
    return report


@dataclass(frozen=True)
class OrbitTruth:
    faithful: frozenset[Classifier]
    aligned: frozenset[Classifier]
    flip_aligned: frozenset[Classifier]


def accepted_balanced(spec: OracleSpec, *, budget: int = DEFAULT_BUDGET) -> tuple[list[Classifier], list[Classifier]]:
    """``(V, V_B)`` computed straight from the oracle definition."""
    oracle = Oracle(spec)
    check_budget(spec.n, budget)
    accepted = [
        c for c in Universe(spec.n).classifiers()
        if any(oracle.query(ctx, c) for ctx in range(spec.context_count))
    ]
    return accepted, [c for c in accepted if is_balanced(c, spec.delta)]


def ground_truth_orbits(spec: OracleSpec, *, budget: int = DEFAULT_BUDGET) -> dict[Classifier, OrbitTruth]:
    _, vb = accepted_balanced(spec, budget=budget)
    d = spec.delta
    return {
        t: OrbitTruth(
            frozenset(c for c in vb if is_faithful(c, t, d)),
            frozenset(c for c in vb if in_close_alignment(c, t, d)),
            frozenset(c for c in vb if in_close_alignment(c, t.flip(), d)),
        )
        for t in spec.truth
    }
