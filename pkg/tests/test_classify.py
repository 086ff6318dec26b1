import dataclasses

import numpy as np
import pytest

import expected
from oracles import components, from_key, key_of, orbits
from zomat.bitmat import BitMatrix
from zomat.canon import pi_representative
from zomat.classify import (aggregate, as_array, classify_level, classify_up_to, extend_level,
                            extend_raw, format_summary, load_checkpoint, parse_summary, phi_closure,
                            read_binary_set, reduce_to_phi, verify_level, write_binary_set,
                            write_checkpoint)
from zomat.errors import ConfigError, MatrixFormatError, ParseError
from zomat.snf import smith_normal_form


def _rows(level):
    return [(r.snf, r.matrices, r.pi_classes, r.phi_classes, r.representative) for r in level.records]


@pytest.mark.parametrize("n", range(1, 7))
def test_records_reproduced(levels, n):
    assert _rows(levels[n - 1]) == expected.records(n)


@pytest.mark.parametrize("n", range(1, 7))
def test_levels_verify(levels, n):
    level = levels[n - 1]
    report = verify_level(level)
    assert report.ok, report.violations
    assert (level.matrix_total, level.pi_total, len(level.phi_reps)) == expected.TOTALS[n]


def test_order6_full_rank_class(levels):
    ones = next(r for r in levels[5].records if r.snf.diag == (1,) * 6)
    assert (ones.matrices, ones.pi_classes, ones.phi_classes) == (18480102480, 39637, 952)


@pytest.mark.parametrize("n", range(1, 7))
def test_pi_per_phi_sizes(levels, n):
    assert {p.pi_classes for p in levels[n - 1].phi_classes} == expected.PI_PER_PHI[n]


def test_tampered_record_is_named(levels):
    level = levels[3]
    bad = dataclasses.replace(level.records[2], matrices=level.records[2].matrices + 1)
    broken = dataclasses.replace(level, records=[*level.records[:2], bad, *level.records[3:]])
    report = verify_level(broken)
    assert not report.ok
    assert any(str(bad.snf) in v for v in report.violations)


def test_unsorted_records_fail(levels):
    level = levels[2]
    broken = dataclasses.replace(level, records=list(reversed(level.records)))
    assert not verify_level(broken).ok


def test_extend_level_small_orders(levels):
    assert len(extend_level(levels[1].phi_reps, 2)) == 36
    assert len(extend_level(levels[2].phi_reps, 3)) == 317


def test_extend_level_gives_all_pi_reps_order4(levels):
    uf = orbits(4, with_xor=False)
    minima = sorted(components(uf, 1 << 16))
    got = [key_of(r, 4) for r in extend_level(levels[2].phi_reps, 3)]
    assert got == minima


def test_raw_extensions_of_single_seed():
    raw = extend_raw(np.array([[0]]), 1)
    brute = {pi_representative(BitMatrix(2, (x << 1 | y0, y1 << 1 | b))).rep.rows
             for x in (0,) for y0 in (0, 1) for y1 in (0, 1) for b in (0, 1)}
    assert {tuple(r) for r in raw} == brute


def test_reduce_to_phi_examples(levels):
    pi3 = extend_level(levels[1].phi_reps, 2)
    assert len(reduce_to_phi(pi3, 3)) == 12
    zero = np.zeros((1, 3), dtype=np.int64)
    assert reduce_to_phi(zero, 3).tolist() == zero.tolist()
    with pytest.raises(ConfigError):
        reduce_to_phi(pi3, 3, budget=15)


def test_reduce_order6(levels):
    pi6 = extend_level(levels[4].phi_reps, 5)
    assert len(pi6) == 251610
    assert np.array_equal(reduce_to_phi(pi6, 6), levels[5].phi_reps)


def test_small_budget_same_result(levels):
    pi4 = extend_level(levels[2].phi_reps, 3)
    assert np.array_equal(reduce_to_phi(pi4, 4, budget=25), levels[3].phi_reps)
    assert np.array_equal(phi_closure(pi4, 4, budget=25), pi4)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_partition_matches_brute_force(levels, n):
    size = 1 << (n * n)
    pi_uf = orbits(n, with_xor=False)
    pi_min = {pi_uf.find(k) for k in range(size)}
    phi = components(orbits(n, with_xor=True), size)
    brute = {}
    for root, members in phi.items():
        rep = from_key(root, n)
        brute[rep] = (smith_normal_form(rep), len(set(members) & pi_min), len(members))
    got = {p.rep: (p.snf, p.pi_classes, p.matrices) for p in levels[n - 1].phi_classes}
    assert got == brute


@pytest.mark.parametrize("n", [3, 4, 5])
def test_warm_start_and_symmetry_flags_agree(levels, n):
    seeds = levels[n - 2].phi_reps
    ref = extend_raw(seeds, n - 1)
    assert np.array_equal(extend_raw(seeds, n - 1, warm=False), ref)
    assert np.array_equal(extend_raw(seeds, n - 1, symmetry=False), ref)
    assert np.array_equal(extend_raw(seeds, n - 1, thread_count=3), ref)


def test_shards_union_to_full_level(levels):
    full = levels[4]
    parts = [classify_level(levels[3].phi_reps, 5, shard=(k, 3)) for k in range(3)]
    for p in parts:
        assert p.partial and verify_level(p).ok
    merged = {pc.rep: pc for p in parts for pc in p.phi_classes}
    assert sorted(merged, key=BitMatrix.key) == [pc.rep for pc in full.phi_classes]
    assert aggregate(sorted(merged.values(), key=lambda p: p.rep.key()), 5).records == full.records


@pytest.mark.parametrize("n", range(1, 6))
def test_singular_forms_lift_one_order(levels, n):
    lower = {r.snf.with_zero() for r in levels[n - 1].records}
    upper = {r.snf for r in levels[n].records if r.snf.rank <= n}
    assert lower == upper


def test_checkpoint_round_trip(levels, tmp_path):
    for level in levels[:4]:
        write_checkpoint(level, tmp_path)
    back = load_checkpoint(tmp_path, 4)
    assert back.records == levels[3].records
    assert back.phi_classes == levels[3].phi_classes
    assert np.array_equal(back.phi_reps, levels[3].phi_reps)
    assert parse_summary(format_summary(levels[3]), 4) == levels[3].records


def test_checkpoints_written_per_level(tmp_path):
    classify_up_to(3, checkpoint_dir=tmp_path)
    assert {p.name for p in tmp_path.iterdir()} == {
        f"order{n}_{kind}" for n in (1, 2, 3) for kind in ("phi.txt", "summary.tsv", "classes.tsv")}


def test_summary_parse_errors():
    with pytest.raises(ParseError):
        parse_summary("(1,1)\t1\t1\n", 2)
    with pytest.raises(ParseError):
        parse_summary("(1,1)\t6\t2\t1\t1,2,4\n", 2)


def test_binary_set_round_trip(levels, tmp_path):
    path = tmp_path / "set.bin"
    reps = extend_level(levels[4].phi_reps, 5)
    assert write_binary_set(path, reps, 6) == len(reps)
    n, back = read_binary_set(path)
    assert n == 6 and np.array_equal(back, reps)


def test_binary_set_rejects_bad_input(tmp_path):
    with pytest.raises(ConfigError):
        write_binary_set(tmp_path / "a.bin", np.zeros((1, 9), dtype=np.int64), 9)
    with pytest.raises(MatrixFormatError):
        write_binary_set(tmp_path / "a.bin", np.array([[1, 2], [0, 1]]), 2)
    (tmp_path / "b.bin").write_bytes(b"NOPE\x01\x02")
    with pytest.raises(ParseError):
        read_binary_set(tmp_path / "b.bin")
    (tmp_path / "c.bin").write_bytes(b"ZOMS\x01\x03\x01\x05")
    with pytest.raises(ParseError):
        read_binary_set(tmp_path / "c.bin")


def test_order_bounds():
    with pytest.raises(ConfigError):
        classify_up_to(0)
    with pytest.raises(ConfigError):
        classify_level(None, 3)
    with pytest.raises(ConfigError):
        extend_raw(np.zeros((1, 2), dtype=np.int64), 2, thread_count=0)


def test_as_array_shape():
    assert as_array([], 3).shape == (0, 3)
