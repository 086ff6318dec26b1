import pytest
from hypothesis import given, settings, strategies as st

from oracles import bordered_lists, determinantal_snf, laplace_det
from strategies import bitmatrices
from zomat.bitmat import from_hex
from zomat.errors import ContractError, ParseError
from zomat.exact import determinant, matmul
from zomat.snf import (SnfVector, parse_snf, smith_normal_form, snf_decomposition, snf_of_extension,
                       validate_chain)


def test_same_det_different_forms():
    # the two smallest matrices sharing |det| 4 but not their Smith form
    a, b = from_hex("3,C,15,16,19"), from_hex("3,5,9,11,1E")
    assert abs(determinant(a)) == abs(determinant(b)) == 4
    assert smith_normal_form(a).diag == (1, 1, 1, 2, 2)
    assert smith_normal_form(b).diag == (1, 1, 1, 1, 4)


def test_known_small_forms():
    assert smith_normal_form(from_hex("3,5,6")).diag == (1, 1, 2)
    assert smith_normal_form(from_hex("0,0,0")).diag == (0, 0, 0)
    assert smith_normal_form([[2, 4], [6, 8]]).diag == (2, 4)


@pytest.mark.parametrize("text,diag", [("(1^3,2,0)", (1, 1, 1, 2, 0)), ("(0^2)", (0, 0)),
                                       ("1,2,2", (1, 2, 2))])
def test_parse(text, diag):
    v = parse_snf(text)
    assert v.diag == diag
    assert parse_snf(v.short()) == v
    assert parse_snf(str(v)) == v


def test_parse_rejects_bad_token():
    with pytest.raises(ParseError):
        parse_snf("(1,a)")


@pytest.mark.parametrize("diag", [(2, 1), (0, 1), (1, 3, 4), (-1,)])
def test_invalid_chains_rejected(diag):
    assert not validate_chain(diag)
    with pytest.raises(ContractError):
        SnfVector(diag)


def test_sort_key_puts_lower_rank_first():
    forms = [SnfVector((1, 1, 1, 1)), SnfVector((1, 1, 2, 0)), SnfVector((1, 1, 1, 0)),
             SnfVector((0, 0, 0, 0))]
    ordered = sorted(forms, key=SnfVector.sort_key)
    assert [f.diag for f in ordered] == [(0, 0, 0, 0), (1, 1, 1, 0), (1, 1, 2, 0), (1, 1, 1, 1)]


@given(bitmatrices(1, 4))
def test_matches_determinantal_divisors(a):
    assert smith_normal_form(a).diag == determinantal_snf(a.to_lists())


@given(bitmatrices(1, 7))
def test_chain_rank_and_det(a):
    s = smith_normal_form(a)
    assert validate_chain(s.diag)
    assert s.adv == abs(determinant(a))
    assert s.rank == sum(1 for d in s.diag if d)


@given(bitmatrices(1, 6))
def test_decomposition_is_unimodular(a):
    dec = snf_decomposition(a)
    P, Q = dec.P.to_lists(), dec.Q.to_lists()
    assert abs(laplace_det(P)) == 1 and abs(laplace_det(Q)) == 1
    n = a.order
    D = [[dec.D.diag[i] if i == j else 0 for j in range(n)] for i in range(n)]
    assert matmul(matmul(P, a.to_lists()), Q) == D


@settings(max_examples=60)
@given(st.data())
def test_incremental_extension_form(data):
    base = data.draw(bitmatrices(1, 5))
    m = base.order
    x = data.draw(st.integers(0, (1 << m) - 1))
    y = data.draw(st.integers(0, (1 << m) - 1))
    b = data.draw(st.integers(0, 1))
    dec = snf_decomposition(base)
    assert snf_of_extension(dec, x, y, b) == smith_normal_form(bordered_lists(base, x, y, b))


def test_extension_rejects_bad_border():
    dec = snf_decomposition(from_hex("3,5,6"))
    with pytest.raises(ContractError):
        snf_of_extension(dec, 8, 0, 0)
    with pytest.raises(ContractError):
        snf_of_extension(dec, 0, 0, 2)
