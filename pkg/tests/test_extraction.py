from fractions import Fraction
from itertools import combinations, permutations
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from conftest import WORKED_T, bits, brute_hamming, brute_transport, worked_spec
from fairextract import (
    Classifier,
    GrayPolicy,
    OracleSpec,
    QueryHandle,
    check_assumptions,
    check_situation_a,
    fuzzy_extract,
    gen_instance,
    ground_truth_orbits,
    hamming_extract,
    merge_ones,
    quadrant_sizes,
    sharp_extract,
    strong_extract,
    symmetric_extract,
    verify_fuzzy,
    verify_theorem2,
)
from fairextract.errors import DegenerateOrbitError, GenerationError
from fairextract.extraction import (
    OrbitFamily,
    SharpOutput,
    error_cap,
    sharpen,
    verify_hamming,
    within_cap,
)
from fairextract.oracle import accepted_balanced

POLICIES = ("accept-all", "reject-all", "seeded-random", "adversarial-flip-favoring")


def handle(spec):
    return QueryHandle.for_spec(spec)


def with_quadrants(g00, g01, g10, g11):
    """A pair (u, v) whose quadrant sizes are exactly the given ones."""
    u = "0" * (g00 + g01) + "1" * (g10 + g11)
    v = "0" * g00 + "1" * g01 + "0" * g10 + "1" * g11
    return bits(u), bits(v)


def assumption_specs(policy, count, n_values=(8, 10, 12), delta=Fraction(1, 200)):
    specs, seed = [], 0
    while len(specs) < count:
        n = n_values[seed % len(n_values)]
        m = 1 + seed % 3
        try:
            specs.append(gen_instance(n, m, delta, "transport", GrayPolicy(policy, seed=seed), 1000 + seed))
        except GenerationError:
            pass
        seed += 1
    return specs


# -- strong ------------------------------------------------------------------


def test_strong_examples():
    spec = OracleSpec(4, (bits("0011"), bits("0101")), 0, "strong", context_count=2,
                      accepting_contexts=({1}, {0}))
    assert strong_extract(handle(spec)) == [bits("0011"), bits("0101")]
    ones = OracleSpec(4, (bits("1111"),), 0, "strong")
    assert strong_extract(handle(ones)) == [bits("1111")]


def test_strong_random_n10_m4():
    spec = gen_instance(10, 4, 0, "strong", GrayPolicy(), 3, context_count=3)
    assert strong_extract(handle(spec)) == sorted(spec.truth)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 12), st.data())
def test_strong_equals_truth(n, data):
    m = data.draw(st.integers(1, 5))
    values = data.draw(st.lists(st.integers(0, (1 << n) - 1), min_size=1, max_size=m, unique=True))
    k = data.draw(st.integers(1, 3))
    acc = [frozenset(data.draw(st.sets(st.integers(0, k - 1), min_size=1))) for _ in values]
    spec = OracleSpec(n, tuple(Classifier(n, v) for v in values), 0, "strong",
                      context_count=k, accepting_contexts=tuple(acc))
    assert strong_extract(handle(spec)) == sorted(spec.truth)


# -- Hamming -----------------------------------------------------------------


@pytest.mark.parametrize("policy", POLICIES)
def test_hamming_zero_delta_singletons(policy):
    spec = OracleSpec(8, (bits("00001111"), bits("11000011")), 0, "hamming", gray_policy=GrayPolicy(policy))
    clusters = hamming_extract(handle(spec), 0)
    assert [c.members for c in clusters] == [{bits("00001111")}, {bits("11000011")}]


def test_hamming_flip_pair_balls():
    t = bits("0000011111")
    spec = OracleSpec(10, (t, t.flip()), 2, "hamming", gray_policy=GrayPolicy("accept-all"))
    clusters = hamming_extract(handle(spec), 2)
    ball = sum(comb(10, k) for k in range(3))
    assert ball == 56
    assert [len(c.members) for c in clusters] == [ball, ball]
    for c, centre in zip(clusters, (t, t.flip())):
        assert c.members == {x for x in c.members if brute_hamming(str(x), str(centre)) <= 2}
        assert c.verified
    assert verify_hamming(spec, clusters).passed


def test_hamming_seeded_random_count():
    spec = gen_instance(10, 3, 1, "hamming", GrayPolicy("seeded-random", seed=4), 8)
    clusters = hamming_extract(handle(spec), 1)
    assert len(clusters) == 3
    assert verify_hamming(spec, clusters).passed


def test_hamming_unseparated_flagged():
    # two truths at distance 2 with delta 2: one merged component, seen by the verifier
    spec = OracleSpec(8, (bits("00001111"), bits("00111111")), 2, "hamming", gray_policy=GrayPolicy("accept-all"))
    clusters = hamming_extract(handle(spec), 2)
    assert len(clusters) == 1
    assert not clusters[0].verified
    assert not verify_hamming(spec, clusters).passed


# -- Situation A ---------------------------------------------------------------


def test_situation_a_examples():
    d = Fraction(1, 50)  # sqrt(2 d) * 10 = 2
    u, v = with_quadrants(4, 1, 3, 2)
    assert tuple(quadrant_sizes(u, v)) == (4, 1, 3, 2)
    assert check_situation_a(u, v, d)
    u, v = with_quadrants(3, 3, 2, 2)
    assert not check_situation_a(u, v, d)
    t = bits("0000111111")
    assert check_situation_a(t, t.flip(), d)


def test_situation_a_boundary_is_exact():
    d = Fraction(1, 50)
    u, v = with_quadrants(2, 2, 3, 3)  # small side equals the threshold but nothing is larger
    assert not check_situation_a(u, v, d)
    u, v = with_quadrants(3, 2, 3, 2)
    assert check_situation_a(u, v, d)


# -- Fuzzy Extraction ---------------------------------------------------------------


def test_fuzzy_worked(worked):
    fam = fuzzy_extract(handle(worked), worked.delta)
    assert fam.to_lists() == [["00001111"], ["00110011"], [], []]
    assert not fam.constant_orbits
    assert verify_fuzzy(worked, fam).passed


def test_fuzzy_worked_accept_all_matches_ground_truth():
    spec = worked_spec("accept-all")
    fam = fuzzy_extract(handle(spec), spec.delta)
    gt = ground_truth_orbits(spec)
    for (orb, orb_prime), t in zip(fam.orbits, spec.truth):
        assert orb == gt[t].faithful - gt[t].flip_aligned
        assert orb_prime == gt[t].flip_aligned
    assert fam.constant_orbits
    assert verify_fuzzy(spec, fam).passed


def test_fuzzy_flip_seeded_into_primed_orbit():
    t = bits("0000011111")
    spec = OracleSpec(10, (t,), Fraction(1, 200), "transport", gray_policy=GrayPolicy("accept-all"))
    fam = fuzzy_extract(handle(spec), spec.delta)
    assert fam.m == 1
    orb, orb_prime = fam.orbits[0]
    assert t in orb and t.flip() in orb_prime


def test_fuzzy_mutation_moved_member_fails(worked):
    t1, t2 = worked.truth
    fam = OrbitFamily([(frozenset({t1, t2}), frozenset()), (frozenset(), frozenset())])
    rep = verify_fuzzy(worked, fam)
    assert not rep.faithful_ok
    assert not rep.passed and rep.label == "algorithm-failure"


def test_fuzzy_missing_member_fails_cover(worked):
    fam = OrbitFamily([(frozenset({worked.truth[0]}), frozenset())])
    rep = verify_fuzzy(worked, fam)
    assert not rep.disjoint_cover_ok and not rep.truth_placement_ok


def test_fuzzy_near_duplicate_labeled_assumption_violated():
    spec = OracleSpec(12, (bits("000000111111"), bits("000001111111")), Fraction(1, 200), "transport",
                      gray_policy=GrayPolicy("accept-all"))
    assert not check_assumptions(spec).ok
    rep = verify_fuzzy(spec, fuzzy_extract(handle(spec), spec.delta))
    assert not rep.passed
    assert rep.label == "assumption-violated"


@pytest.mark.parametrize("policy", POLICIES)
def test_same_neighbourhood_dichotomy(policy):
    for spec in assumption_specs(policy, 6):
        _, vb = accepted_balanced(spec)
        thr = 2 * spec.delta * spec.n ** 2
        for u, v in combinations(vb, 2):
            shared = any(brute_transport(str(t), str(u)) <= spec.delta and brute_transport(str(t), str(v)) <= spec.delta
                         for t in spec.truth)
            if shared:
                assert check_situation_a(u, v, spec.delta) or check_situation_a(u, v.flip(), spec.delta)
            else:
                g = quadrant_sizes(u, v)
                assert min(g.g00, g.g01) ** 2 > thr or min(g.g10, g.g11) ** 2 > thr


# -- Sharp Extraction -----------------------------------------------------------


def test_sharp_worked(worked):
    out = sharp_extract(handle(worked), worked.delta)
    assert [str(p) for p in out.P] == list(WORKED_T)
    assert [str(q) for q in out.Q] == list(WORKED_T)
    for ix, t in zip(out.intermediates, worked.truth):
        assert ix.pi == ix.gamma == {t}
        assert not ix.pi_prime and not ix.gamma_prime
        assert ix.v is None and ix.x is None
    rep = verify_theorem2(worked, out)
    assert rep.passed
    assert all(c.p_error == 0 and c.q_error == 0 for c in rep.per_index)
    assert [c.t_index for c in rep.per_index] == [0, 1]


@pytest.mark.parametrize("s", ["0000011111", "0011001101", "0111000110"])
def test_singleton_orbit_recovers_exactly(s):
    t = bits(s)
    out = sharpen(OrbitFamily([(frozenset({t}), frozenset())]))
    assert out.P == [t] and out.Q == [t]


def test_primed_only_orbit_uses_flip():
    t = bits("0000011111")
    out = sharpen(OrbitFamily([(frozenset(), frozenset({t.flip()}))]))
    assert out.P == [t] and out.Q == [t]


def test_degenerate_orbit_names_index():
    a, b = bits("0011"), bits("0101")
    assert merge_ones([a, b]) not in {a, b}
    fam = OrbitFamily([(frozenset({bits("0001").flip()}), frozenset()), (frozenset({a, b}), frozenset())])
    with pytest.raises(DegenerateOrbitError) as info:
        sharpen(fam)
    assert info.value.index == 1
    assert "_2" in str(info.value)


@pytest.mark.parametrize("policy", POLICIES)
def test_sharp_random_assumption_instances(policy):
    for spec in assumption_specs(policy, 8):
        out = sharp_extract(handle(spec), spec.delta)
        assert verify_fuzzy(spec, out.family).passed
        assert verify_theorem2(spec, out).passed


def test_screening_soundness_and_containment():
    checked = 0
    for seed in range(40):
        try:
            spec = gen_instance(12, 2, Fraction(5, 66), "transport", GrayPolicy("accept-all"), seed, relaxed=True)
        except GenerationError:
            continue
        out = sharp_extract(handle(spec), spec.delta)
        for (orb, _), ix in zip(out.family.orbits, out.intermediates):
            pi = sorted(ix.pi)
            for p in pi:
                rest = [q for q in pi if q != p]
                for r in range(len(rest) + 1):
                    for sub in combinations(rest, r):
                        assert merge_ones([p, *sub]) in orb
                        checked += 1
            for t in spec.truth:
                if t in ix.pi:
                    assert ix.u.zeros_side <= t.zeros_side
    assert checked > 0


def test_pivot_order_robustness():
    specs = [worked_spec(p) for p in POLICIES] + assumption_specs("accept-all", 4, n_values=(8,))
    for spec in specs:
        _, vb = accepted_balanced(spec)
        assert len(vb) <= 6
        for order in permutations(vb):
            rank = {c: i for i, c in enumerate(order)}
            out = sharp_extract(handle(spec), spec.delta, pivot=lambda cs: min(cs, key=rank.__getitem__))
            assert verify_theorem2(spec, out).passed


# -- recovery bounds ------------------------------------------------------------


def test_error_cap_arithmetic():
    cap = error_cap(Fraction(1, 2), Fraction(1, 50), 1)
    assert cap == pytest.approx((0.5 - 0.21 ** 0.5) / 2, abs=1e-15)
    assert cap == pytest.approx(0.0209, abs=5e-5)
    assert error_cap(Fraction(1, 10), Fraction(1, 50), 10) is None
    assert within_cap(0, Fraction(1, 10), Fraction(1, 50), 10) is None


def test_within_cap_is_exact_at_boundary():
    # tau = 1/2, delta = 3/32 gives sqrt(1/4 - 3/16) = 1/4, cap (1/2 - 1/4) / 2 * n = n / 8
    assert within_cap(2, Fraction(1, 2), Fraction(3, 32), 16)
    assert not within_cap(3, Fraction(1, 2), Fraction(3, 32), 16)


def test_mutated_output_fails_named_index(worked):
    out = sharp_extract(handle(worked), worked.delta)
    p = out.P[0]
    stray = min(p.zeros_side)
    out.P[0] = Classifier(p.n, p.value | (1 << (p.n - 1 - stray)))
    assert quadrant_sizes(out.P[0], worked.truth[0]).g10 == 1
    rep = verify_theorem2(worked, out)
    assert not rep.passed
    assert not rep.per_index[0].passed and rep.per_index[1].passed
    assert any(f.startswith("index 1:") for f in rep.findings)


def test_duplicate_indices_break_injectivity(worked):
    t = worked.truth[0]
    out = SharpOutput([t, t], [t, t], [], OrbitFamily([]))
    rep = verify_theorem2(worked, out)
    assert not rep.injective_matching_ok and not rep.passed


def test_flipped_orientation_matches():
    spec = worked_spec()
    t = spec.truth[1]
    out = SharpOutput([spec.truth[0], t.flip()], [spec.truth[0], t.flip()], [], OrbitFamily([]))
    rep = verify_theorem2(spec, out)
    assert rep.passed
    assert rep.per_index[1].orientation == "flipped"


# -- symmetrized cost ----------------------------------------------------------------


def test_symmetric_worked():
    spec = worked_spec(kind="symmetric-transport")
    assert [str(c) for c in symmetric_extract(handle(spec), spec.delta)] == ["00001111", "00110011"]


def test_symmetric_flip_pair_single_partition():
    t = bits("0000011111")
    spec = OracleSpec(10, (t, t.flip()), Fraction(1, 200), "symmetric-transport")
    assert symmetric_extract(handle(spec), spec.delta) == [t]


def test_symmetric_orientation_irrelevant():
    t = bits("1110010100")
    a = OracleSpec(10, (t,), Fraction(1, 200), "symmetric-transport")
    b = OracleSpec(10, (t.flip(),), Fraction(1, 200), "symmetric-transport")
    assert symmetric_extract(handle(a), a.delta) == symmetric_extract(handle(b), b.delta) == [t.canonical()]
