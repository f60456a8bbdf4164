"""Seeded instance generation.

Truth sets are drawn by rejection sampling with restarts.  Streams derive
from the root seed (see :mod:`fairextract.seeding`): ``("gen", attempt,
"truth")`` for the classifiers and ``("gen", "contexts")`` for the accepting
contexts.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .classifier import (
    Classifier,
    exceeds_sqrt,
    hamming,
    in_close_alignment,
    quadrant_sizes,
    transport_cost,
)
from .errors import GenerationError
from .oracle import DistanceKind, GrayPolicy, OracleSpec, check_assumptions
from .seeding import rng

RESTARTS = 25
DRAWS_PER_MEMBER = 400


def _smallest_exceeding(factor: int, delta: Fraction, n: int) -> int:
    """Smallest integer k with k > sqrt(factor * delta) * n."""
    k = math.isqrt(int(factor * delta * n * n))
    while not exceeds_sqrt(k, factor, delta, n):
        k += 1
    while k > 0 and exceeds_sqrt(k - 1, factor, delta, n):
        k -= 1
    return k


def _random_with_ones(r, n: int, lo: int, hi: int) -> Classifier:
    k = r.randint(lo, hi)
    return Classifier.from_ones(n, r.sample(range(n), k))


def _transport_compatible(t: Classifier, u: Classifier, delta: Fraction, relaxed: bool) -> bool:
    if u == t or u == t.flip():
        return False
    if relaxed:
        if in_close_alignment(u, t.flip(), delta) or in_close_alignment(t, u.flip(), delta):
            return False
        return transport_cost(t, u).value > delta and transport_cost(u, t).value > delta
    g = quadrant_sizes(t, u)
    if sum(1 for x in g if x == 0) > 1:
        return False
    return all(x == 0 or exceeds_sqrt(x, 8, delta, t.n) for x in g)


def gen_instance(
    n: int,
    m: int,
    delta,
    distance_kind: DistanceKind | str,
    policy: GrayPolicy,
    seed: int,
    *,
    context_count: int = 1,
    relaxed: bool = False,
) -> OracleSpec:
    """Draw an oracle spec with ``m`` truth classifiers on ``n`` individuals.

    For transport kinds every member is 4*delta-balanced, every pair satisfies
    the quadrant condition, and flip rejection is enforced.  ``relaxed`` swaps
    the quadrant condition for plain two-way cost separation (``> delta``) and
    4*delta-balance for delta-balance; such instances carry no recovery
    guarantee.  Hamming truth sets are pairwise separated by more than
    ``4 * delta``.
    """
    kind = DistanceKind(distance_kind)
    delta = Fraction(delta)
    if n < 4:
        raise GenerationError(f"need n >= 4, got {n}", "n")
    if m < 1:
        raise GenerationError(f"need m >= 1, got {m}", "m")
    if kind == DistanceKind.STRONG:
        delta = Fraction(0)

    if kind.is_transport:
        side = _smallest_exceeding(2 if relaxed else 8, delta, n)
        if m >= 2 and not relaxed and 3 * max(side, 1) > n:
            raise GenerationError(
                f"assumption-1(2) infeasible: three non-empty quadrants of more than "
                f"{float(math.sqrt(8 * delta) * n):.3f} elements do not fit in {n} individuals",
                "assumption-1(2)",
            )
        if 2 * max(side, 1) > n:
            raise GenerationError(
                f"assumption-1(1) infeasible: both sides need more than "
                f"{float(math.sqrt((2 if relaxed else 8) * delta) * n):.3f} "
                f"of {n} individuals",
                "assumption-1(1)",
            )
        lo, hi = max(side, 1), n - max(side, 1)
    elif kind == DistanceKind.HAMMING:
        if m >= 2 and 4 * delta >= n:
            raise GenerationError(
                f"hamming separation infeasible: distinct classifiers differ in at most {n} positions, "
                f"need more than {4 * delta}",
                "hamming-separation",
            )
        lo, hi = 0, n
    else:
        if m > 1 << n:
            raise GenerationError(f"only {1 << n} classifiers exist", "m")
        lo, hi = 0, n

    truth = None
    for attempt in range(RESTARTS):
        r = rng(seed, "gen", attempt, "truth")
        chosen: list[Classifier] = []
        draws = 0
        while len(chosen) < m and draws < DRAWS_PER_MEMBER * m:
            draws += 1
            c = _random_with_ones(r, n, lo, hi)
            if c in chosen:
                continue
            if kind.is_transport:
                ok = all(_transport_compatible(t, c, delta, relaxed) for t in chosen)
            elif kind == DistanceKind.HAMMING:
                ok = all(hamming(t, c) > 4 * delta for t in chosen)
            else:
                ok = True
            if ok:
                chosen.append(c)
        if len(chosen) == m:
            truth = chosen
            break
    if truth is None:
        binding = {
            DistanceKind.HAMMING: "hamming-separation",
            DistanceKind.STRONG: "m",
        }.get(kind, "separation" if relaxed else "assumption-1(2)")
        raise GenerationError(
            f"could not draw {m} compatible truth classifiers on n={n} at delta={delta} "
            f"after {RESTARTS} restarts ({binding} binding)",
            binding,
        )

    rc = rng(seed, "gen", "contexts")
    contexts = tuple(frozenset({rc.randrange(context_count)}) for _ in truth)
    spec = OracleSpec(
        n=n,
        truth=tuple(truth),
        delta=delta,
        distance_kind=kind,
        context_count=context_count,
        accepting_contexts=contexts,
        gray_policy=policy,
        enforce_flip_rejection=kind.is_transport,
    )
    if not relaxed:
        report = check_assumptions(spec)
        if not report.ok:
            raise GenerationError("; ".join(report.violations), "assumptions")
    return spec
