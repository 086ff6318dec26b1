import pytest
from hypothesis import given, strategies as st

from oracles import laplace_det
from strategies import bitmatrices
from zomat.bitmat import BitMatrix
from zomat.errors import IntegerOverflowError
from zomat.exact import IntMatrix, adjugate, determinant, hadamard_bound, matmul, rank, rank_rect


@given(bitmatrices(1, 6))
def test_det_matches_laplace(a):
    assert determinant(a) == laplace_det(a.to_lists())


@given(st.lists(st.lists(st.integers(-50, 50), min_size=4, max_size=4), min_size=4, max_size=4))
def test_det_of_integer_matrices(m):
    assert determinant(m) == laplace_det(m)


@given(bitmatrices(1, 6))
def test_adjugate_identity(a):
    n = a.order
    adj = adjugate(a).to_lists()
    d = determinant(a)
    assert matmul(a.to_lists(), adj) == [[d if i == j else 0 for j in range(n)] for i in range(n)]


@given(bitmatrices(1, 6))
def test_rank_bounds(a):
    r = rank(a)
    assert 0 <= r <= a.order
    assert (r == a.order) == (determinant(a) != 0)


def test_rank_of_known_matrices():
    assert rank(BitMatrix.zero(4)) == 0
    assert rank(BitMatrix.ones(4)) == 1
    assert rank(BitMatrix.identity(5)) == 5
    assert rank_rect([[1, 0, 1], [0, 1, 1]]) == 2
    assert rank_rect([]) == 0


def test_intmatrix_product():
    a = IntMatrix.from_lists([[1, 2], [3, 4]])
    assert (a @ IntMatrix.identity(2)) == a


def test_overflow_is_reported():
    big = 1 << 126
    with pytest.raises(IntegerOverflowError):
        determinant([[big, big - 1], [-big, big]])


@pytest.mark.parametrize("n,bound", [(1, 1), (2, 1), (3, 2), (4, 3), (5, 5), (6, 9), (7, 32)])
def test_hadamard_bound_dominates_max_det(n, bound):
    # maximal |det| values for n <= 7 are known to be at most the bound
    assert hadamard_bound(n).floor >= bound
