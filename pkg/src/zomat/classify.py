"""Level-by-level classification of (0,1) matrices.

Order n+1 is reached from the φ-representatives of order n: their bordered
extensions, canonicalised, meet every φ-class of order n+1.  Reducing that set
with the φ-orbit sweep gives the φ-representatives of order n+1 together with
each class's π-representatives, which is all the size statistics need.
"""

from __future__ import annotations

import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import factorial
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .bitmat import BitMatrix, read_matrix_set, write_matrix_set
from .canon import KERNEL_MAX_ORDER
from .count import pi_class_count
from .errors import ConfigError, MatrixFormatError, ParseError
from .snf import SnfVector, parse_snf, smith_normal_form

DEFAULT_BUDGET = 1 << 22
WARM_CAP = 64


@dataclass(frozen=True, slots=True)
class ClassRecord:
    snf: SnfVector
    matrices: int
    pi_classes: int
    phi_classes: int
    representative: BitMatrix


@dataclass(frozen=True, slots=True)
class PhiClass:
    rep: BitMatrix
    snf: SnfVector
    pi_classes: int
    matrices: int


@dataclass
class LevelResult:
    order: int
    phi_reps: np.ndarray
    records: list[ClassRecord]
    phi_classes: list[PhiClass] = field(default_factory=list)
    partial: bool = False

    @property
    def pi_total(self) -> int:
        return sum(r.pi_classes for r in self.records)

    @property
    def matrix_total(self) -> int:
        return sum(r.matrices for r in self.records)


@dataclass
class VerifyReport:
    order: int
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


# -- helpers -------------------------------------------------------------------

def as_array(mats: Iterable[BitMatrix], n: int) -> np.ndarray:
    rows = [m.rows for m in mats]
    return np.array(rows, dtype=np.int64).reshape(len(rows), n)


def to_bitmatrix(row: Sequence[int], n: int) -> BitMatrix:
    return BitMatrix(n, tuple(int(v) for v in row))


def _key(row: Sequence[int], n: int) -> int:
    k = 0
    for r in row:
        k = (k << n) | int(r)
    return k


def _sorted_unique(parts: list[np.ndarray], n: int) -> np.ndarray:
    if not parts:
        return np.zeros((0, n), dtype=np.int64)
    return np.unique(np.concatenate(parts), axis=0)


def _check_order(n: int) -> None:
    if not 1 <= n <= KERNEL_MAX_ORDER:
        raise ConfigError(f"classification supports orders 1..{KERNEL_MAX_ORDER}")


# -- extension -----------------------------------------------------------------

def _extend_one(base: np.ndarray, m: int, warm: bool, symmetry: bool) -> np.ndarray:
    if warm:
        reps, _ = _kernels.extend_canon_warm(base, m, symmetry, WARM_CAP)
    else:
        reps, _ = _kernels.extend_canon(base, m, symmetry)
    return np.unique(reps, axis=0)


def _extend_shard(bases: np.ndarray, m: int, warm: bool, symmetry: bool) -> np.ndarray:
    return _sorted_unique([_extend_one(b, m, warm, symmetry) for b in bases], m + 1)


def extend_raw(phi_reps: np.ndarray, n: int, thread_count: int = 1, warm: bool = True,
               symmetry: bool = True, shards: int | None = None) -> np.ndarray:
    """Sorted π-representatives of all extensions of the given order-n matrices."""
    _check_order(n + 1)
    if thread_count < 1:
        raise ConfigError("thread_count must be at least 1")
    phi_reps = np.ascontiguousarray(phi_reps, dtype=np.int64).reshape(-1, n)
    k = shards or thread_count
    groups = [phi_reps[i::k] for i in range(k)]
    if thread_count == 1:
        parts = [_extend_shard(g, n, warm, symmetry) for g in groups]
    else:
        with ThreadPoolExecutor(thread_count) as pool:
            parts = list(pool.map(lambda g: _extend_shard(g, n, warm, symmetry), groups))
    return _sorted_unique(parts, n + 1)


@dataclass
class _Orbit:
    rep: np.ndarray
    members: np.ndarray
    counts: np.ndarray


def _sweep(pi_reps: np.ndarray, n: int, budget: int, symmetry: bool) -> list[_Orbit]:
    """The φ-orbit sweep over a sorted set of π-representatives."""
    if budget < (n + 1) ** 2:
        raise ConfigError(f"memory budget {budget} is below (n+1)^2 = {(n + 1) ** 2}")
    rest = pi_reps
    orbits: list[_Orbit] = []
    removed: set[int] = set()
    i = 0
    while i < len(rest):
        row = rest[i]
        if _key(row, n) in removed:
            i += 1
            continue
        members, counts = _kernels.phi_orbit(np.ascontiguousarray(row), n, symmetry)
        orbits.append(_Orbit(members[0], members, counts))
        removed.update(_key(r, n) for r in members)
        i += 1
        if len(removed) > budget:
            tail = rest[i:]
            keep = np.array([_key(r, n) not in removed for r in tail], dtype=bool)
            rest = tail[keep] if len(tail) else tail
            removed.clear()
            i = 0
    return orbits


def reduce_to_phi(pi_reps: np.ndarray, n: int, budget: int = DEFAULT_BUDGET,
                  symmetry: bool = True) -> np.ndarray:
    """One φ-representative per φ-class met by ``pi_reps``, sorted."""
    pi_reps = np.asarray(pi_reps, dtype=np.int64).reshape(-1, n)
    orbits = _sweep(pi_reps, n, budget, symmetry)
    return _sorted_unique([o.rep[None, :] for o in orbits], n)


def phi_closure(pi_reps: np.ndarray, n: int, budget: int = DEFAULT_BUDGET,
                symmetry: bool = True) -> np.ndarray:
    """All π-representatives of every φ-class met by ``pi_reps``, sorted."""
    orbits = _sweep(np.asarray(pi_reps, dtype=np.int64).reshape(-1, n), n, budget, symmetry)
    return _sorted_unique([o.members for o in orbits], n)


def extend_level(phi_reps: np.ndarray, n: int, thread_count: int = 1, warm: bool = True,
                 symmetry: bool = True, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """π-representatives of order n+1 reachable from the given order-n φ-representatives.

    The raw extensions are closed under the φ-orbits they touch, so for the
    full set of order-n φ-representatives the result is every
    π-representative of order n+1.
    """
    raw = extend_raw(phi_reps, n, thread_count, warm, symmetry)
    return phi_closure(raw, n + 1, budget, symmetry)


# -- aggregation ---------------------------------------------------------------

def _phi_classes(orbits: list[_Orbit], n: int) -> list[PhiClass]:
    nf2 = factorial(n) ** 2
    out = []
    for o in sorted(orbits, key=lambda o: tuple(o.rep)):
        rep = to_bitmatrix(o.rep, n)
        mats = sum(nf2 // int(c) for c in o.counts)
        out.append(PhiClass(rep, smith_normal_form(rep), len(o.members), mats))
    return out


def aggregate(phi_classes: list[PhiClass], n: int, partial: bool = False) -> LevelResult:
    by_snf: dict[SnfVector, list[PhiClass]] = {}
    for pc in phi_classes:
        by_snf.setdefault(pc.snf, []).append(pc)
    records = []
    for snf in sorted(by_snf, key=SnfVector.sort_key):
        group = by_snf[snf]
        records.append(ClassRecord(
            snf,
            sum(p.matrices for p in group),
            sum(p.pi_classes for p in group),
            len(group),
            min((p.rep for p in group), key=BitMatrix.key),
        ))
    reps = as_array((p.rep for p in phi_classes), n)
    return LevelResult(n, reps, records, phi_classes, partial)


def classify_level(prev_phi: np.ndarray | None, n: int, thread_count: int = 1, warm: bool = True,
                   symmetry: bool = True, budget: int = DEFAULT_BUDGET,
                   shard: tuple[int, int] | None = None,
                   max_raw: int | None = None) -> LevelResult:
    """Classify order ``n`` from the φ-representatives of order ``n - 1``.

    ``shard=(k, K)`` keeps only seeds ``k, k+K, ...`` and ``max_raw`` keeps
    only the first ``max_raw`` extension π-representatives.  Either makes the
    result a partial level that satisfies the per-record invariants but not
    the totals.
    """
    _check_order(n)
    if n == 1:
        raw = np.array([[0], [1]], dtype=np.int64)
    else:
        if prev_phi is None:
            raise ConfigError(f"order {n} needs the order-{n - 1} φ-representatives")
        seeds = np.asarray(prev_phi, dtype=np.int64).reshape(-1, n - 1)
        if shard is not None:
            k, total = shard
            seeds = seeds[k::total]
        raw = extend_raw(seeds, n - 1, thread_count, warm, symmetry)
    truncated = max_raw is not None and len(raw) > max_raw
    if truncated:
        raw = raw[:max_raw]
    orbits = _sweep(raw, n, budget, symmetry)
    return aggregate(_phi_classes(orbits, n), n, partial=shard is not None or truncated)


def classify_up_to(n_max: int, thread_count: int = 1, checkpoint_dir: str | Path | None = None,
                   warm: bool = True, symmetry: bool = True,
                   budget: int = DEFAULT_BUDGET) -> list[LevelResult]:
    if n_max < 1:
        raise ConfigError("n_max must be at least 1")
    _check_order(n_max)
    results: list[LevelResult] = []
    prev = None
    for n in range(1, n_max + 1):
        res = classify_level(prev, n, thread_count, warm, symmetry, budget)
        if checkpoint_dir is not None:
            try:
                write_checkpoint(res, checkpoint_dir)
            except OSError as exc:
                raise OSError(f"checkpoint for order {n} failed: {exc}") from exc
        results.append(res)
        prev = res.phi_reps
    return results


# -- verification --------------------------------------------------------------

def verify_level(result: LevelResult) -> VerifyReport:
    n = result.order
    bad: list[str] = []
    for r in result.records:
        tag = f"record {r.snf}"
        if not r.matrices >= r.pi_classes >= r.phi_classes >= 1:
            bad.append(f"{tag}: counts {r.matrices}, {r.pi_classes}, {r.phi_classes} not decreasing")
        if len(r.snf) != n or r.representative.order != n:
            bad.append(f"{tag}: wrong order")
    keys = [r.snf.sort_key() for r in result.records]
    if keys != sorted(keys) or len(set(keys)) != len(keys):
        bad.append("records are not in report order")
    if result.phi_classes:
        by_snf: dict[SnfVector, list[PhiClass]] = {}
        for p in result.phi_classes:
            by_snf.setdefault(p.snf, []).append(p)
        for r in result.records:
            group = by_snf.get(r.snf, [])
            if sum(p.matrices for p in group) != r.matrices:
                bad.append(f"record {r.snf}: matrix count {r.matrices} disagrees with its φ-classes")
            if sum(p.pi_classes for p in group) != r.pi_classes:
                bad.append(f"record {r.snf}: π-class count {r.pi_classes} disagrees with its φ-classes")
            if len(group) != r.phi_classes:
                bad.append(f"record {r.snf}: φ-class count {r.phi_classes} disagrees with its φ-classes")
            if group and min((p.rep for p in group), key=BitMatrix.key) != r.representative:
                bad.append(f"record {r.snf}: representative is not the least φ-representative")
    if len(result.phi_reps) != sum(r.phi_classes for r in result.records):
        bad.append("φ-representative set size differs from the φ-class total")
    if len(result.phi_reps) > 1 and not np.all(
            [tuple(a) < tuple(b) for a, b in zip(result.phi_reps[:-1], result.phi_reps[1:])]):
        bad.append("φ-representatives are not strictly increasing")
    if not result.partial:
        if result.matrix_total != 1 << (n * n):
            bad.append(f"matrix total {result.matrix_total} != 2^{n * n}")
        expected = pi_class_count(n)
        if result.pi_total != expected:
            bad.append(f"π-class total {result.pi_total} != {expected}")
    return VerifyReport(n, bad)


# -- files -------------------------------------------------------------------

SUMMARY_HEADER = "snf\tmatrices\tpi_classes\tphi_classes\trepresentative"


def format_summary(result: LevelResult) -> str:
    lines = [SUMMARY_HEADER]
    for r in result.records:
        lines.append(f"{r.snf.short()}\t{r.matrices}\t{r.pi_classes}\t{r.phi_classes}\t"
                     f"{r.representative.hex_line()}")
    return "\n".join(lines) + "\n"


def parse_summary(text: str, n: int) -> list[ClassRecord]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.startswith("snf\t"):
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise ParseError(f"summary line {lineno}: expected 5 fields")
        from .bitmat import from_hex
        rep = from_hex(parts[4])
        if rep.order != n:
            raise ParseError(f"summary line {lineno}: representative has order {rep.order}")
        out.append(ClassRecord(parse_snf(parts[0]), int(parts[1]), int(parts[2]), int(parts[3]), rep))
    return out


PHI_TSV_HEADER = "representative\tsnf\tpi_classes\tmatrices"


def write_checkpoint(result: LevelResult, directory: str | Path) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    n = result.order
    write_matrix_set(d / f"order{n}_phi.txt", (to_bitmatrix(r, n) for r in result.phi_reps))
    (d / f"order{n}_summary.tsv").write_text(format_summary(result), encoding="ascii")
    lines = [PHI_TSV_HEADER]
    for p in result.phi_classes:
        lines.append(f"{p.rep.hex_line()}\t{p.snf.short()}\t{p.pi_classes}\t{p.matrices}")
    (d / f"order{n}_classes.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_checkpoint(directory: str | Path, n: int) -> LevelResult:
    d = Path(directory)
    phi = read_matrix_set(d / f"order{n}_phi.txt")
    records = parse_summary((d / f"order{n}_summary.tsv").read_text(encoding="ascii"), n)
    classes = []
    cpath = d / f"order{n}_classes.tsv"
    if cpath.exists():
        from .bitmat import from_hex
        for line in cpath.read_text(encoding="utf-8").splitlines()[1:]:
            if line.strip():
                rep, snf, pi, mats = line.split("\t")
                classes.append(PhiClass(from_hex(rep), parse_snf(snf), int(pi), int(mats)))
    return LevelResult(n, as_array(phi, n), records, classes)


# -- compact binary matrix sets -------------------------------------------------
#
# Header: b"ZOMS", u8 version, u8 order.  Body: groups sharing their first
# n-2 rows, each written as [n-2 prefix bytes][u8 count][count x 2 suffix
# bytes].  A group longer than 255 is split.  One byte per row limits the
# format to orders 2..8.

BINARY_MAGIC = b"ZOMS"
BINARY_VERSION = 1


def write_binary_set(path: str | Path, mats: np.ndarray, n: int) -> int:
    if not 2 <= n <= 8:
        raise ConfigError("binary sets support orders 2..8")
    mats = np.asarray(mats, dtype=np.int64).reshape(-1, n)
    if len(mats) > 1 and not all(tuple(a) < tuple(b) for a, b in zip(mats[:-1], mats[1:])):
        raise MatrixFormatError("matrix set must be strictly increasing")
    out = bytearray(BINARY_MAGIC + struct.pack("BB", BINARY_VERSION, n))
    i = 0
    while i < len(mats):
        prefix = tuple(int(v) for v in mats[i, : n - 2])
        j = i
        while j < len(mats) and j - i < 255 and tuple(int(v) for v in mats[j, : n - 2]) == prefix:
            j += 1
        out += bytes(prefix) + bytes([j - i])
        for k in range(i, j):
            out += bytes([int(mats[k, n - 2]), int(mats[k, n - 1])])
        i = j
    with open(path, "wb") as fh:
        fh.write(out)
    return len(mats)


def read_binary_set(path: str | Path) -> tuple[int, np.ndarray]:
    data = Path(path).read_bytes()
    if data[:4] != BINARY_MAGIC or len(data) < 6:
        raise ParseError(f"{path}: not a binary matrix set")
    version, n = data[4], data[5]
    if version != BINARY_VERSION:
        raise ParseError(f"{path}: unsupported version {version}")
    if not 2 <= n <= 8:
        raise ParseError(f"{path}: bad order {n}")
    rows = []
    pos = 6
    while pos < len(data):
        if pos + n - 1 > len(data):
            raise ParseError(f"{path}: truncated group header")
        prefix = list(data[pos: pos + n - 2])
        count = data[pos + n - 2]
        pos += n - 1
        if pos + 2 * count > len(data):
            raise ParseError(f"{path}: truncated group body")
        for _ in range(count):
            rows.append(prefix + [data[pos], data[pos + 1]])
            pos += 2
    arr = np.array(rows, dtype=np.int64).reshape(-1, n)
    if np.any(arr >= (1 << n)):
        raise MatrixFormatError(f"{path}: row word does not fit order {n}")
    return n, arr


def default_threads() -> int:
    return max(1, os.cpu_count() or 1)
