import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaosadapt.indexing import MultiIndexSet, count_basis, enumerate_multiindices


def binomial_by_product(n, k):
    # independent of math.comb: explicit integer product
    value = 1
    for i in range(1, k + 1):
        value = value * (n - k + i) // i
    return value


def test_count_basis_examples():
    assert count_basis(12, 3) == 455
    assert count_basis(5, 0) == 1
    assert count_basis(1, 0) == 1
    assert count_basis(11, 4) == binomial_by_product(15, 4) == 1365


def test_count_basis_large_uses_exact_integers():
    assert count_basis(30, 30) == binomial_by_product(60, 30)


def test_count_basis_rejects_bad_arguments():
    with pytest.raises(ValueError):
        count_basis(0, 3)
    with pytest.raises(ValueError):
        count_basis(3, -1)


def test_enumerate_small_sets():
    assert list(enumerate_multiindices(2, 1)) == [(0, 0), (0, 1), (1, 0)]
    assert list(enumerate_multiindices(1, 3)) == [(0,), (1,), (2,), (3,)]


def test_enumeration_cardinality_matches_count():
    for d, q in [(2, 3), (3, 4), (12, 3), (5, 2)]:
        assert len(MultiIndexSet(d, q)) == count_basis(d, q)


def test_ordering_graded_then_lexicographic():
    s = MultiIndexSet(3, 4)
    degrees = s.degrees
    assert degrees[0] == 0
    assert np.all(np.diff(degrees) >= 0)
    rows = list(s)
    for a, b in zip(rows, rows[1:]):
        if sum(a) == sum(b):
            assert a < b  # plain lexicographic within a degree


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 5))
def test_enumeration_is_exactly_the_degree_ball(d, q):
    s = MultiIndexSet(d, q)
    seen = set(s)
    assert len(seen) == len(s)
    assert all(sum(a) <= q for a in seen)
    assert len(seen) == count_basis(d, q)


def test_position_lookup_roundtrips():
    s = MultiIndexSet(4, 3)
    for j, alpha in enumerate(s):
        assert s.position(alpha) == j


def test_decrement_table():
    s = MultiIndexSet(2, 2)
    table = s.decrement_table()
    for j, alpha in enumerate(s):
        for i in range(2):
            if alpha[i] == 0:
                assert table[j, i] == -1
            else:
                lowered = list(alpha)
                lowered[i] -= 1
                assert table[j, i] == s.position(tuple(lowered))


def test_pad_positions_appends_zeros():
    narrow = MultiIndexSet(2, 3)
    wide = MultiIndexSet(3, 3)
    positions = narrow.pad_positions(wide)
    for j, alpha in enumerate(narrow):
        assert tuple(wide.indices[positions[j]]) == alpha + (0,)


def test_pad_positions_rejects_order_mismatch():
    with pytest.raises(ValueError):
        MultiIndexSet(2, 2).pad_positions(MultiIndexSet(3, 3))
