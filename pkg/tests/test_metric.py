import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import bits
from fairextract import Classifier, coarse_metric, combine_thresholds, threshold_family
from fairextract.errors import ConsistencyError, DomainError
from fairextract.metric import ThresholdStack, as_matrix, from_triangular, to_triangular


def pair_matrix(x):
    return [[0, x], [x, 0]]


def test_coarse_examples():
    m = coarse_metric(bits("0011"))
    assert m.lookup(0, 1) == 0
    assert m.lookup(1, 2) == 1


@given(st.integers(2, 12).flatmap(lambda n: st.builds(Classifier, st.just(n), st.integers(0, (1 << n) - 1))))
def test_coarse_flip_invariant(c):
    assert coarse_metric(c).matrix() == coarse_metric(c.flip()).matrix()
    assert coarse_metric(c) == coarse_metric(c.flip())


def test_coarse_pseudometric_axioms_n20():
    r = random.Random(20)
    for _ in range(5):
        m = coarse_metric(Classifier(20, r.getrandbits(20))).matrix()
        for u in range(20):
            assert m[u][u] == 0
            for v in range(20):
                assert m[u][v] == m[v][u] and m[u][v] in (0, 1)
                for w in range(20):
                    assert m[u][w] <= m[u][v] + m[v][w]


def test_threshold_levels_for_037():
    stack = threshold_family(pair_matrix(Fraction(37, 100)), 10)
    assert [level[0][1] for level in stack.levels] == [1, 1, 1, 0, 0, 0, 0, 0, 0, 0]
    assert stack.threshold(1) == Fraction(1, 10)
    assert combine_thresholds(stack)[0][1] == Fraction(3, 10)


def test_zero_metric():
    d = [[0] * 4 for _ in range(4)]
    stack = threshold_family(d, 5)
    assert all(x == 0 for level in stack.levels for row in level for x in row)
    assert combine_thresholds(stack) == d


def test_grid_point_value():
    # exactly on a threshold the level does not fire
    stack = threshold_family(pair_matrix(Fraction(3, 10)), 10)
    assert combine_thresholds(stack)[0][1] == Fraction(2, 10)


def test_two_class_levels_are_partitions():
    c = bits("001101")
    d = coarse_metric(c).matrix()
    stack = threshold_family(d, 4)
    assert all(stack.partition_consistent())
    assert stack.level_metric(1) == coarse_metric(c)


def test_general_levels_flagged():
    d = [[0, Fraction(1, 2), 1], [Fraction(1, 2), 0, Fraction(1, 2)], [1, Fraction(1, 2), 0]]
    stack = threshold_family(d, 2)
    assert stack.partition_consistent() == [False, True]
    assert stack.level_metric(1) is None


@pytest.mark.parametrize("d", [
    [[0, 1], [0, 0]],
    [[1, 0], [0, 0]],
    [[0, 2], [2, 0]],
    [[0, 1, 0], [1, 0]],
])
def test_bad_matrix(d):
    with pytest.raises(DomainError):
        as_matrix(d)


def test_non_monotone_stack_rejected():
    up = ((0, 0), (0, 0))
    on = ((0, 1), (1, 0))
    stack = ThresholdStack(2, (up, on))
    assert not stack.is_monotone()
    with pytest.raises(ConsistencyError):
        combine_thresholds(stack)


@given(st.integers(1, 12), st.lists(st.fractions(0, 1), min_size=6, max_size=6))
def test_generated_stacks_monotone_and_close(k, vals):
    n = 4
    d = [[Fraction(0)] * n for _ in range(n)]
    it = iter(vals)
    for u in range(n):
        for v in range(u + 1, n):
            d[u][v] = d[v][u] = next(it)
    stack = threshold_family(d, k)
    assert stack.is_monotone()
    est = combine_thresholds(stack)
    for u in range(n):
        for v in range(n):
            assert 0 <= d[u][v] - est[u][v] <= Fraction(1, k)


def test_triangular_round_trip():
    d = as_matrix([[0, Fraction(1, 3), 1], [Fraction(1, 3), 0, 0], [1, 0, 0]])
    rows = to_triangular(d)
    assert rows == [["1/3", "1/1"], ["0/1"]]
    assert from_triangular(rows) == d
