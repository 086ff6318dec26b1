import itertools

import pytest
from hypothesis import given, strategies as st

from oracles import all_matrices, components, orbits
from zomat.count import (factorize, partitions_at_most, pi_class_count, rank1_count, rank2_count,
                         snf_count_upper_bound)
from zomat.exact import rank

PI_CLASSES = {
    1: 2, 2: 7, 3: 36, 4: 317, 5: 5624, 6: 251610, 7: 33642660, 8: 14685630688,
    9: 21467043671008, 10: 105735224248507784, 11: 1764356230257807614296,
    12: 100455994644460412263071692, 13: 19674097197480928600253198363072,
    14: 13363679231028322645152300040033513414,
    15: 31735555932041230032311939400670284689732948,
}

RANK1 = {1: 1, 2: 9, 3: 49, 4: 225, 5: 961, 6: 3969, 7: 16129, 8: 65025}
RANK2 = {2: 6, 3: 288, 4: 6750, 5: 118800, 6: 1807806, 7: 25316928, 8: 336954750}

PARTITIONS = [
    [1, 0, 0, 0, 0, 0, 0, 0],
    [1, 1, 1, 1, 1, 1, 1, 1],
    [1, 1, 2, 2, 3, 3, 4, 4],
    [1, 1, 2, 3, 4, 5, 7, 8],
    [1, 1, 2, 3, 5, 6, 9, 11],
    [1, 1, 2, 3, 5, 7, 10, 13],
    [1, 1, 2, 3, 5, 7, 11, 14],
    [1, 1, 2, 3, 5, 7, 11, 15],
]


@pytest.mark.parametrize("n", sorted(PI_CLASSES))
def test_pi_class_count_values(n):
    assert pi_class_count(n) == PI_CLASSES[n]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pi_class_count_brute_force(n):
    assert len(components(orbits(n, with_xor=False), 1 << (n * n))) == pi_class_count(n)


def test_pi_class_count_domain():
    with pytest.raises(ValueError):
        pi_class_count(0)
    with pytest.raises(ValueError):
        pi_class_count(31)


@pytest.mark.parametrize("n", range(1, 9))
def test_rank_formulas(n):
    assert rank1_count(n) == RANK1[n]
    assert rank2_count(n) == RANK2.get(n, 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_rank_formulas_brute_force(n):
    census = [0] * (n + 1)
    for a in all_matrices(n):
        census[rank(a)] += 1
    assert census[1] == rank1_count(n)
    if n >= 2:
        assert census[2] == rank2_count(n)


def test_partition_grid():
    for n, row in enumerate(PARTITIONS):
        assert [partitions_at_most(n, r) for r in range(8)] == row


def _brute_partitions(n, r):
    return sum(1 for parts in itertools.product(range(r + 1), repeat=n)
               if sum(parts) == r and list(parts) == sorted(parts))


@given(st.integers(0, 5), st.integers(0, 8))
def test_partition_recurrence_matches_brute_force(n, r):
    assert partitions_at_most(n, r) == (_brute_partitions(n, r) if n else int(r == 0))


def test_partition_domain():
    with pytest.raises(ValueError):
        partitions_at_most(-1, 2)


@given(st.integers(1, 10 ** 6))
def test_factorize_round_trip(d):
    f = factorize(d)
    prod = 1
    for p, a in f.items():
        assert all(p % q for q in range(2, int(p ** 0.5) + 1))
        prod *= p ** a
    assert prod == d


@pytest.mark.parametrize("n,d,bound", [(8, 36, 4), (6, 9, 2), (6, 8, 3), (5, 1, 1), (1, 12, 1)])
def test_snf_count_bound(n, d, bound):
    assert snf_count_upper_bound(n, d) == bound


def test_snf_count_bound_domain():
    with pytest.raises(ValueError):
        snf_count_upper_bound(4, 0)
