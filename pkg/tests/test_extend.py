import itertools

import pytest
from hypothesis import given, settings, strategies as st

from oracles import bordered_lists, laplace_det
from strategies import bitmatrices
from zomat.bitmat import BitMatrix, from_hex
from zomat.exact import determinant
from zomat.extend import (bordered, enumerate_extension_dets, extension_dets, extension_snf_set,
                          extension_snf_set_direct, extension_spectrum, fibonacci_matrix,
                          fibonacci_number)
from zomat.snf import smith_normal_form
from zomat.spectra import extremal_check

SEED9 = "7,39,5A,9C,E1,149,174,193,1AA"


def test_bordered_layout():
    base = from_hex("1,2")
    e = bordered(base, x=0b10, y=0b01, b=1)
    assert e.to_lists() == [[0, 1, 0], [1, 0, 1], [1, 0, 1]]
    assert e.to_lists() == bordered_lists(base, 0b10, 0b01, 1)


def test_order_one_extensions():
    got = {(x, y, b): d for x, y, b, d in enumerate_extension_dets(BitMatrix.identity(1))}
    assert len(got) == 8
    assert got[(1, 1, 0)] == -1
    assert set(got.values()) == {-1, 0, 1}


@settings(max_examples=30)
@given(bitmatrices(1, 4))
def test_streamed_dets_match_direct(a):
    seen = 0
    for x, y, b, d in enumerate_extension_dets(a):
        assert d == laplace_det(bordered_lists(a, x, y, b))
        seen += 1
    assert seen == 2 << (2 * a.order)


@settings(max_examples=30)
@given(bitmatrices(1, 5))
def test_dets_array_matches_stream(a):
    arr = extension_dets(a)
    for x, y, b, d in enumerate_extension_dets(a):
        assert arr[b, x, y] == d


@given(bitmatrices(1, 6))
def test_spectrum_kernel_matches_array(a):
    spec = extension_spectrum(a)
    assert spec.covered == {abs(int(v)) for v in extension_dets(a).ravel()}
    assert spec.first_missing not in spec.covered
    assert all(v in spec.covered for v in range(spec.first_missing))


def test_zero_base_spectrum():
    spec = extension_spectrum(BitMatrix.zero(3))
    assert spec.covered == {0}
    assert spec.first_missing == 1


def test_order9_seed_spectrum():
    a = from_hex(SEED9)
    assert abs(determinant(a)) == 110
    assert extension_spectrum(a).first_missing == 257


@pytest.mark.parametrize("n", range(1, 13))
def test_fibonacci_matrices(n):
    f = fibonacci_matrix(n)
    fn = fibonacci_number(n)
    assert determinant(f) == fn
    assert extension_spectrum(f).first_missing >= 2 * fn


def test_fibonacci_shape():
    assert fibonacci_matrix(1) == BitMatrix.identity(1)
    assert determinant(fibonacci_matrix(3)) == 2
    assert determinant(fibonacci_matrix(12)) == 144
    assert fibonacci_matrix(4).to_lists() == [[1, 0, 1, 0], [1, 1, 0, 1], [0, 1, 1, 0], [0, 0, 1, 1]]
    with pytest.raises(ValueError):
        fibonacci_matrix(0)


@settings(max_examples=25, deadline=None)
@given(bitmatrices(1, 4))
def test_snf_set_matches_brute_force(a):
    m = a.order
    brute = {smith_normal_form(bordered_lists(a, x, y, b))
             for x, y, b in itertools.product(range(1 << m), range(1 << m), (0, 1))}
    assert extension_snf_set(a) == brute
    assert extension_snf_set_direct(a) == brute


@settings(max_examples=15, deadline=None)
@given(bitmatrices(5, 6))
def test_snf_set_fast_matches_direct(a):
    assert extension_snf_set(a) == extension_snf_set_direct(a)


@pytest.mark.parametrize("base", [BitMatrix.identity(4), from_hex("1,3,6,C")])
def test_unimodular_base_leaves_one_free_invariant(base):
    assert smith_normal_form(base).diag == (1,) * 4
    for f in extension_snf_set(base):
        assert f.diag[:4] == (1,) * 4


def test_extremal_minor_extension_max():
    adv, perm = extremal_check(6)
    assert adv == 18
    base = BitMatrix.from_lists([row[:6] for row in perm.to_lists()[:6]])
    assert abs(determinant(base)) == 1
    forms = extension_snf_set(base)
    assert all(f.diag[:6] == (1,) * 6 for f in forms)
    assert max(f.adv for f in forms) == 18
