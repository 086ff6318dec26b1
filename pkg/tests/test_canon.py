from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import all_matrices, components, from_key, orbit_min_and_count, orbits
from strategies import bitmatrices, perms
from zomat import _kernels
from zomat.bitmat import BitMatrix, apply_perms, from_hex
from zomat.canon import (orbit_size_from_count, phi_orbit_pi_reps, phi_representative, pi_class_size,
                         pi_representative, pi_representative_py)


@pytest.mark.parametrize("engine", ["kernel", "python"])
@pytest.mark.parametrize("symmetry", [True, False])
def test_exhaustive_order3(engine, symmetry):
    for a in all_matrices(3):
        cert = pi_representative(a, symmetry=symmetry, engine=engine)
        rep, count = orbit_min_and_count(a)
        assert cert.rep == rep
        assert cert.count == count
        assert apply_perms(a, cert.P, cert.Q) == cert.rep


@pytest.mark.parametrize("symmetry", [True, False])
def test_exhaustive_order4_against_orbit_minima(symmetry):
    uf = orbits(4, with_xor=False)
    comp = components(uf, 1 << 16)
    size_of = {root: len(members) for root, members in comp.items()}
    mats = np.array([[(k >> (4 * (3 - i))) & 15 for i in range(4)] for k in range(1 << 16)],
                    dtype=np.int64)
    reps, counts = _kernels.canon_batch(mats, 4, symmetry)
    for k in range(1 << 16):
        root = uf.find(k)
        # component roots are the smallest key in the orbit
        assert tuple(reps[k]) == from_key(root, 4).rows
        assert orbit_size_from_count(4, int(counts[k])) == size_of[root]


def test_worked_example():
    a = BitMatrix.from_lists([[1, 0, 1], [1, 1, 0], [1, 0, 0]])
    assert pi_representative(a).rep == BitMatrix.from_lists([[0, 0, 1], [0, 1, 1], [1, 0, 1]])
    assert pi_class_size(a.transpose()) == 18


def test_small_known_representatives():
    assert pi_representative(BitMatrix.identity(3)).rep == from_hex("1,2,4")
    z = BitMatrix.zero(4)
    assert pi_representative(z).rep == z
    assert pi_representative(z).count == factorial(4) ** 2
    assert pi_class_size(z) == 1
    assert phi_representative(BitMatrix.from_lists([[0, 1], [1, 1]])) == \
        BitMatrix.from_lists([[0, 1], [1, 0]])
    assert phi_orbit_pi_reps(z) == {z}


def test_order_zero_and_one():
    assert pi_representative(BitMatrix(0, ())).count == 1
    assert pi_representative(BitMatrix.identity(1)).rep == BitMatrix.identity(1)


@settings(max_examples=40)
@given(st.data())
def test_representative_is_invariant(data):
    a = data.draw(bitmatrices(1, 7))
    n = a.order
    b = apply_perms(a, data.draw(perms(n)), data.draw(perms(n)))
    ca, cb = pi_representative(a), pi_representative(b)
    assert ca.rep == cb.rep and ca.count == cb.count
    assert ca.rep.key() <= a.key()
    assert apply_perms(a, ca.P, ca.Q) == ca.rep


@settings(max_examples=25)
@given(bitmatrices(1, 6))
def test_kernel_and_python_agree(a):
    k = pi_representative(a, engine="kernel")
    p = pi_representative_py(a)
    assert (k.rep, k.count) == (p.rep, p.count)


@settings(max_examples=40)
@given(bitmatrices(1, 7))
def test_symmetry_shortcut_does_not_change_result(a):
    on, off = pi_representative(a, symmetry=True), pi_representative(a, symmetry=False)
    assert (on.rep, on.count) == (off.rep, off.count)


@given(bitmatrices(1, 6))
def test_class_size_matches_count(a):
    cert = pi_representative(a)
    assert pi_class_size(a) == factorial(a.order) ** 2 // cert.count


def test_class_size_order3_sums_to_all():
    reps = {pi_representative(a).rep for a in all_matrices(3)}
    assert len(reps) == 36
    assert sum(pi_class_size(r) for r in reps) == 512


def test_kernel_order_limit():
    with pytest.raises(ValueError):
        pi_representative(BitMatrix.zero(13), engine="kernel")


def test_phi_representative_constant_on_orbits_order4():
    uf = orbits(4, with_xor=True)
    comp = components(uf, 1 << 16)
    assert len(comp) == 39
    for root, members in comp.items():
        want = from_key(root, 4)
        for k in members:
            assert phi_representative(from_key(k, 4)) == want


def test_phi_orbit_reps_of_identity():
    reps = phi_orbit_pi_reps(BitMatrix.identity(2))
    # I_2 and its X-images: identity, [[1,1],[0,1]] type, and [[0,1],[1,1]] type
    assert min(reps, key=BitMatrix.key) == from_hex("1,2")
    assert all(pi_representative(r).rep == r for r in reps)
