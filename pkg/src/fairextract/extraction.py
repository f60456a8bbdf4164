"""Extraction procedures that recover the truth set from oracle queries.

Every procedure takes a :class:`~fairextract.oracle.QueryHandle` and never
sees the truth set.  Verification functions take the spec and check the
outputs against brute-force ground truth.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import networkx as nx

from .classifier import (
    Classifier,
    exceeds_sqrt,
    hamming,
    is_balanced,
    is_faithful,
    merge_ones,
    merge_zeros,
    quadrant_sizes,
    within_sqrt,
)
from .errors import DegenerateOrbitError
from .oracle import (
    DEFAULT_BUDGET,
    OracleSpec,
    QueryHandle,
    accepted_balanced,
    check_assumptions,
    enumerate_accepted,
)

PivotRule = Callable[[Sequence[Classifier]], Classifier]


def _lexicographic(candidates: Sequence[Classifier]) -> Classifier:
    return candidates[0]


def strong_extract(handle: QueryHandle, *, budget: int = DEFAULT_BUDGET, threads: int = 1) -> list[Classifier]:
    return enumerate_accepted(handle, budget=budget, threads=threads)


# -- Hamming ---------------------------------------------------------------


@dataclass(frozen=True)
class Cluster:
    representative: Classifier
    members: frozenset[Classifier]
    verified: bool


def hamming_extract(
    handle: QueryHandle, delta: int, *, budget: int = DEFAULT_BUDGET, threads: int = 1
) -> list[Cluster]:
    """Connected components of the accepted set under ``d_H <= 2 * delta``.

    With truth members separated by more than ``4 * delta`` the delta-balls
    are at distance more than ``2 * delta`` from each other, so components
    are exactly the accepted parts of the balls.  ``verified`` records, without
    looking at the truth, whether some member lies within ``delta`` of every
    other member, which the separation promise guarantees.
    """
    accepted = enumerate_accepted(handle, budget=budget, threads=threads)
    g = nx.Graph()
    g.add_nodes_from(accepted)
    for i, u in enumerate(accepted):
        for v in accepted[i + 1:]:
            if hamming(u, v) <= 2 * delta:
                g.add_edge(u, v)
    clusters = []
    for comp in nx.connected_components(g):
        members = sorted(comp)
        centred = any(all(hamming(c, x) <= delta for x in members) for c in members)
        clusters.append(Cluster(members[0], frozenset(members), centred))
    return sorted(clusters, key=lambda c: c.representative)


@dataclass
class HammingReport:
    component_count: int
    truth_count: int
    assignment: dict[int, int]
    findings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.findings


def verify_hamming(spec: OracleSpec, clusters: Sequence[Cluster]) -> HammingReport:
    delta = int(spec.delta)
    report = HammingReport(len(clusters), len(spec.truth), {})
    if len(clusters) != len(spec.truth):
        report.findings.append(f"{len(clusters)} components for {len(spec.truth)} truth classifiers")
    used: set[int] = set()
    for j, cl in enumerate(clusters):
        near = [i for i, t in enumerate(spec.truth) if hamming(cl.representative, t) <= delta]
        owners = [i for i, t in enumerate(spec.truth) if t in cl.members]
        if len(owners) != 1:
            report.findings.append(f"component {j} contains {len(owners)} truth classifiers")
            continue
        i = owners[0]
        if i not in near:
            report.findings.append(f"component {j}: representative {cl.representative} is farther than {delta} from {spec.truth[i]}")
        if i in used:
            report.findings.append(f"component {j}: truth classifier {i} already assigned")
        used.add(i)
        report.assignment[j] = i
    return report


# -- Fuzzy Extraction ------------------------------------------------------


def check_situation_a(u: Classifier, v: Classifier, delta) -> bool:
    """Whether each side of ``u`` has one small and one large part under ``v``.

    Small means at most ``sqrt(2 delta) n``, large means strictly more.
    """
    g = quadrant_sizes(u, v)
    n = u.n

    def split(a: int, b: int) -> bool:
        return within_sqrt(min(a, b), 2, delta, n) and exceeds_sqrt(max(a, b), 2, delta, n)

    return split(g.g00, g.g01) and split(g.g10, g.g11)


@dataclass
class OrbitFamily:
    orbits: list[tuple[frozenset[Classifier], frozenset[Classifier]]]
    constant_orbits: bool = False

    @property
    def m(self) -> int:
        return len(self.orbits)

    def all_sets(self) -> list[frozenset[Classifier]]:
        return [s for pair in self.orbits for s in pair]

    def to_lists(self) -> list[list[str]]:
        """``Orb_1..Orb_m`` then ``Orb'_1..Orb'_m``, members sorted."""
        firsts = [sorted(o) for o, _ in self.orbits]
        seconds = [sorted(p) for _, p in self.orbits]
        return [[str(c) for c in s] for s in firsts + seconds]


def fuzzy_extract(
    handle: QueryHandle,
    delta,
    *,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
    pivot: PivotRule = _lexicographic,
) -> OrbitFamily:
    """Group accepted balanced classifiers into orbit pairs.

    Each pass picks a pivot (lexicographically smallest remaining by
    default), then routes every remaining classifier in Situation A with it:
    onto the pivot's side when its zeros mostly agree with the pivot's zeros,
    otherwise onto the primed side.  The flip of a routed classifier goes to
    the opposite set.
    """
    delta = Fraction(delta)
    accepted = enumerate_accepted(handle, budget=budget, threads=threads)
    remaining = {c for c in accepted if is_balanced(c, delta)}
    n = handle.n
    orbits = []
    while remaining:
        p = pivot(sorted(remaining))
        orb = {p}
        orb_prime = {p.flip()} if p.flip() in remaining else set()
        for c in sorted(remaining - {p}):
            if c not in remaining or not check_situation_a(p, c, delta):
                continue
            g = quadrant_sizes(p, c)
            same_side = exceeds_sqrt(g.g00, 2, delta, n) and within_sqrt(g.g01, 2, delta, n)
            near, far = (orb, orb_prime) if same_side else (orb_prime, orb)
            near.add(c)
            remaining.discard(c)
            if c.flip() in remaining:
                far.add(c.flip())
                remaining.discard(c.flip())
        remaining -= orb | orb_prime
        orbits.append((frozenset(orb), frozenset(orb_prime)))
    constants = any(c.is_constant for c in accepted)
    return OrbitFamily(orbits, constants)


@dataclass
class FuzzyReport:
    disjoint_cover_ok: bool = True
    faithful_ok: bool = True
    truth_placement_ok: bool = True
    orbit_count_ok: bool = True
    assumptions_ok: bool = True
    findings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.disjoint_cover_ok and self.faithful_ok
            and self.truth_placement_ok and self.orbit_count_ok
        )

    @property
    def label(self) -> str:
        if self.passed:
            return "pass"
        return "assumption-violated" if not self.assumptions_ok else "algorithm-failure"


def verify_fuzzy(spec: OracleSpec, fam: OrbitFamily, *, budget: int = DEFAULT_BUDGET) -> FuzzyReport:
    """Check an orbit family against ground truth computed from the spec.

    (a) orbit sets are pairwise disjoint and cover exactly the accepted
    balanced classifiers, with constant orbits present iff a constant was
    accepted; (b) every orbit pair lies inside one truth member's
    neighbourhood; (c) every truth member sits in exactly one orbit set, and
    no orbit pair holds two truth members that are not flips of each other;
    (d) there is one orbit pair per truth member, counting a member and its
    flip once.
    """
    rep = FuzzyReport(assumptions_ok=check_assumptions(spec, budget=budget).ok)
    accepted, vb = accepted_balanced(spec, budget=budget)
    seen: set[Classifier] = set()
    for k, s in enumerate(fam.all_sets()):
        overlap = seen & s
        if overlap:
            rep.disjoint_cover_ok = False
            rep.findings.append(f"(a) orbit set {k} overlaps earlier sets at {sorted(map(str, overlap))}")
        seen |= s
    if seen != set(vb):
        rep.disjoint_cover_ok = False
        missing, extra = set(vb) - seen, seen - set(vb)
        rep.findings.append(
            f"(a) orbits miss {sorted(map(str, missing))} and hold unexpected {sorted(map(str, extra))}"
        )
    if fam.constant_orbits != any(c.is_constant for c in accepted):
        rep.disjoint_cover_ok = False
        rep.findings.append("(a) constant orbits present iff a constant is accepted: violated")

    d = spec.delta
    for j, (orb, orb_prime) in enumerate(fam.orbits):
        members = orb | orb_prime
        if not any(all(is_faithful(c, t, d) for c in members) for t in spec.truth):
            rep.faithful_ok = False
            rep.findings.append(f"(b) orbit pair {j} lies in no single truth neighbourhood")

    truth = set(spec.truth)
    for i, t in enumerate(spec.truth):
        if t.is_constant:
            if not fam.constant_orbits:
                rep.truth_placement_ok = False
                rep.findings.append(f"(c) constant truth classifier {i} has no constant orbit")
            continue
        homes = [k for k, s in enumerate(fam.all_sets()) if t in s]
        if len(homes) != 1:
            rep.truth_placement_ok = False
            rep.findings.append(f"(c) truth classifier {i} ({t}) appears in {len(homes)} orbit sets")
    for j, (orb, orb_prime) in enumerate(fam.orbits):
        inside = sorted(truth & (orb | orb_prime))
        for a in range(len(inside)):
            for b in inside[a + 1:]:
                if b != inside[a].flip():
                    rep.truth_placement_ok = False
                    rep.findings.append(f"(c) orbit pair {j} merges distinct truths {inside[a]} and {b}")
    classes = len({t.canonical() for t in spec.truth if not t.is_constant})
    if fam.m != classes:
        rep.orbit_count_ok = False
        rep.findings.append(f"(d) {fam.m} orbit pairs for {classes} truth members up to flip")
    return rep


# -- Sharp Extraction ------------------------------------------------------


@dataclass(frozen=True)
class SharpIndex:
    pi: frozenset[Classifier]
    pi_prime: frozenset[Classifier]
    gamma: frozenset[Classifier]
    gamma_prime: frozenset[Classifier]
    u: Classifier | None
    v: Classifier | None
    w: Classifier | None
    x: Classifier | None


@dataclass
class SharpOutput:
    P: list[Classifier]
    Q: list[Classifier]
    intermediates: list[SharpIndex]
    family: OrbitFamily

    @property
    def m(self) -> int:
        return len(self.P)


def _screen(orbit: frozenset[Classifier], merge) -> frozenset[Classifier]:
    return frozenset(p for p in orbit if all(merge([p, q]) in orbit for q in orbit))


def _choose(primary: Classifier | None, primary_size: int, backup: Classifier | None, backup_size: int, j: int, name: str):
    if primary is None and backup is None:
        raise DegenerateOrbitError(f"{name}_{j + 1}: both merge candidates are absent", j)
    if backup is None:
        return primary
    if primary is None:
        return backup.flip()
    return primary if primary_size >= backup_size else backup.flip()


def sharpen(fam: OrbitFamily) -> SharpOutput:
    """Screen and merge each orbit pair of a fuzzy family.

    An empty screened set yields no candidate, and a missing candidate loses
    the final size comparison.
    """
    P, Q, inter = [], [], []
    for j, (orb, orb_prime) in enumerate(fam.orbits):
        pi, gamma = _screen(orb, merge_ones), _screen(orb, merge_zeros)
        pi_p, gamma_p = _screen(orb_prime, merge_zeros), _screen(orb_prime, merge_ones)
        u = merge_ones(pi) if pi else None
        v = merge_zeros(pi_p) if pi_p else None
        w = merge_zeros(gamma) if gamma else None
        x = merge_ones(gamma_p) if gamma_p else None
        P.append(_choose(u, u.n_zeros if u else 0, v, v.n_ones if v else 0, j, "P"))
        Q.append(_choose(w, w.n_ones if w else 0, x, x.n_zeros if x else 0, j, "Q"))
        inter.append(SharpIndex(pi, pi_p, gamma, gamma_p, u, v, w, x))
    return SharpOutput(P, Q, inter, fam)


def sharp_extract(
    handle: QueryHandle,
    delta,
    *,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
    pivot: PivotRule = _lexicographic,
) -> SharpOutput:
    return sharpen(fuzzy_extract(handle, delta, budget=budget, threads=threads, pivot=pivot))


def combine_partition(p: Classifier, q: Classifier) -> Classifier:
    """Join ``p``'s zeros side with ``q``'s ones side into one partition.

    Positions on neither side are undecided and join the zeros.  Where the
    two sides overlap, ``p`` wins.  The result is reported up to flip.
    """
    return Classifier(p.n, q.ones_mask & ~p.zeros_mask).canonical()


def collapse_partitions(out: SharpOutput) -> list[Classifier]:
    """One partition per output index, duplicates dropped, first-seen order."""
    parts: list[Classifier] = []
    for p, q in zip(out.P, out.Q):
        part = combine_partition(p, q)
        if part not in parts:
            parts.append(part)
    return parts


def symmetric_extract(
    handle: QueryHandle, delta, *, budget: int = DEFAULT_BUDGET, threads: int = 1
) -> list[Classifier]:
    """Fair partitions, each given as the lexicographically smaller orientation."""
    return collapse_partitions(sharp_extract(handle, delta, budget=budget, threads=threads))


# -- recovery-bound verification ------------------------------------------


@dataclass(frozen=True)
class IndexCheck:
    j: int
    t_index: int | None
    orientation: str | None
    tau: Fraction | None
    subset_ok: bool
    p_error: int | None
    p_bound: float | None
    q_error: int | None
    q_bound: float | None
    passed: bool

    def to_dict(self) -> dict:
        return {
            "j": self.j,
            "t_index": self.t_index,
            "orientation": self.orientation,
            "tau": None if self.tau is None else f"{self.tau.numerator}/{self.tau.denominator}",
            "subset_ok": self.subset_ok,
            "p_error": self.p_error,
            "p_bound": self.p_bound,
            "q_error": self.q_error,
            "q_bound": self.q_bound,
            "pass": self.passed,
        }


@dataclass
class Theorem2Report:
    per_index: list[IndexCheck]
    injective_matching_ok: bool
    findings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.injective_matching_ok and all(c.passed for c in self.per_index)

    def to_dict(self) -> dict:
        return {
            "per_index": [c.to_dict() for c in self.per_index],
            "injective_matching_ok": self.injective_matching_ok,
            "findings": list(self.findings),
        }


def error_cap(tau: Fraction, delta: Fraction, n: int) -> float | None:
    """``((tau - sqrt(tau^2 - 2 delta)) / 2) * n``, or None when undefined."""
    disc = tau * tau - 2 * delta
    if disc < 0:
        return None
    return (float(tau) - float(disc) ** 0.5) / 2 * n


def within_cap(error: int, tau: Fraction, delta: Fraction, n: int) -> bool | None:
    """Exact ``error <= ((tau - sqrt(tau^2 - 2 delta)) / 2) * n``.

    Rearranged to ``sqrt(tau^2 - 2 delta) <= tau - 2 error / n`` and squared.
    """
    disc = tau * tau - 2 * delta
    if disc < 0:
        return None
    rhs = tau - Fraction(2 * error, n)
    return rhs >= 0 and disc <= rhs * rhs


@dataclass(frozen=True)
class _Candidate:
    t_index: int
    orientation: str
    tau: Fraction
    subset_ok: bool
    p_error: int
    q_error: int
    p_ok: bool | None
    q_ok: bool | None

    @property
    def ok(self) -> bool:
        return self.subset_ok and bool(self.p_ok) and bool(self.q_ok)


def _candidates(spec: OracleSpec, p: Classifier, q: Classifier) -> list[_Candidate]:
    out = []
    for i, t in enumerate(spec.truth):
        for orientation, target in (("direct", t), ("flipped", t.flip())):
            tau = Fraction(target.n_zeros, spec.n)
            p_sub = p.zeros_mask & ~target.zeros_mask == 0
            q_sub = q.ones_mask & ~target.ones_mask == 0
            p_err = (p.ones_mask & target.zeros_mask).bit_count()
            q_err = (q.zeros_mask & target.ones_mask).bit_count()
            out.append(_Candidate(
                i, orientation, tau, p_sub and q_sub, p_err, q_err,
                within_cap(p_err, tau, spec.delta, spec.n),
                within_cap(q_err, 1 - tau, spec.delta, spec.n),
            ))
    return out


def verify_theorem2(spec: OracleSpec, out: SharpOutput) -> Theorem2Report:
    """Match each output index to a distinct truth member within the error caps.

    In the flipped orientation the index is compared with ``flip(t)``, so the
    caps use the fraction of the side actually being recovered.
    """
    findings: list[str] = []
    per_j = [_candidates(spec, p, q) for p, q in zip(out.P, out.Q)]
    g = nx.Graph()
    tops = [("j", j) for j in range(len(per_j))]
    g.add_nodes_from(tops)
    g.add_nodes_from(("t", i) for i in range(len(spec.truth)))
    for j, cands in enumerate(per_j):
        for c in cands:
            if c.ok:
                g.add_edge(("j", j), ("t", c.t_index))
            elif c.subset_ok and (c.p_ok is None or c.q_ok is None):
                findings.append(f"index {j + 1}: error cap undefined for truth {c.t_index} (tau^2 < 2 delta)")
    matching = nx.bipartite.hopcroft_karp_matching(g, top_nodes=tops) if tops else {}
    injective = all(("j", j) in matching for j in range(len(per_j)))

    checks = []
    for j, cands in enumerate(per_j):
        if ("j", j) in matching:
            i = matching[("j", j)][1]
            best = next(c for c in cands if c.t_index == i and c.ok)
            passed = True
        else:
            # closest explanation, for the report only
            best = min(cands, key=lambda c: (not c.subset_ok, c.p_error + c.q_error, c.t_index))
            passed = False
            findings.append(
                f"index {j + 1}: no unused truth classifier satisfies the subset relations and error caps "
                f"(closest: truth {best.t_index} {best.orientation}, p_error={best.p_error}, q_error={best.q_error})"
            )
        checks.append(IndexCheck(
            j + 1, best.t_index, best.orientation, best.tau, best.subset_ok,
            best.p_error, error_cap(best.tau, spec.delta, spec.n),
            best.q_error, error_cap(1 - best.tau, spec.delta, spec.n), passed,
        ))
    return Theorem2Report(checks, injective, findings)
