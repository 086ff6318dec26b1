"""Determinant spectra, rank census, Smith-form incidence and the rank-9 fixture."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .bitmat import BitMatrix, from_hex
from .canon import KERNEL_MAX_ORDER, phi_orbit_pi_reps, phi_representative
from .classify import LevelResult, PhiClass, to_bitmatrix
from .errors import DependencyError
from .exact import determinant, minor, rank
from .extend import extension_snf_set
from .snf import SnfVector, smith_normal_form


@dataclass
class SpectrumReport:
    order: int
    D: frozenset[int]
    a: int
    d: int
    c: int | None = None
    m: int | None = None
    rank_census: dict[int, int] | None = None


def first_missing_positive(values: Iterable[int]) -> int:
    s = set(values)
    a = 1
    while a in s:
        a += 1
    return a


def dets_from_extensions(phi_reps: np.ndarray, m: int) -> frozenset[int]:
    """Union of |det| over all extensions of the given order-m matrices."""
    phi_reps = np.asarray(phi_reps, dtype=np.int64).reshape(-1, m)
    seen = np.zeros(0, dtype=np.int64)
    for base in phi_reps:
        seen = np.union1d(seen, _kernels.extension_abs_dets(np.ascontiguousarray(base), m))
    return frozenset(int(v) for v in seen)


def extension_det_census(prev_level: LevelResult) -> dict[int, int]:
    """Number of order-n matrices with each |det|, from order n-1 alone.

    Every order-n matrix is an extension of its leading order-(n-1) minor.
    Applying a permutation or an X transform at order n maps the extensions
    of ``B`` bijectively onto those of its image and keeps |det|, so the
    histogram of one φ-representative stands for its whole φ-class.
    """
    if not prev_level.phi_classes:
        raise DependencyError(f"order-{prev_level.order} result carries no φ-class data")
    m = prev_level.order
    total = np.zeros(1, dtype=object)
    for pc in prev_level.phi_classes:
        vals = _kernels.extension_abs_det_values(np.array(pc.rep.rows, dtype=np.int64), m)
        hist = np.bincount(vals).astype(object) * pc.matrices
        if len(hist) > len(total):
            hist[:len(total)] += total
            total = hist
        else:
            total[:len(hist)] += hist
    return {v: int(c) for v, c in enumerate(total) if c}


def _adv_of(pc: PhiClass) -> int:
    return pc.snf.adv if pc.snf.rank == len(pc.snf) else 0


def _det_sign_halving(n: int, count: int) -> int:
    # For n >= 2 swapping two rows pairs det = d with det = -d.
    return count // 2 if n >= 2 else count


def spectrum(n: int, prev_level: LevelResult | None = None,
             level: LevelResult | None = None) -> SpectrumReport:
    """Spectrum data for order ``n``.

    ``D`` comes from extending the order-(n-1) φ-representatives when those
    are given, otherwise from the order-n classification.  ``c`` and ``m``
    come from the order-n classification, or failing that from the
    φ-weighted extension census of order n-1.  The rank census needs the
    order-n classification.
    """
    if n < 1:
        raise ValueError("order must be at least 1")
    if level is not None and level.order != n:
        raise DependencyError(f"level result has order {level.order}, expected {n}")
    if prev_level is not None and prev_level.order != n - 1:
        raise DependencyError(f"previous level has order {prev_level.order}, expected {n - 1}")
    if n == 1:
        D = frozenset({0, 1})
    elif prev_level is not None:
        D = dets_from_extensions(prev_level.phi_reps, n - 1)
    elif level is not None:
        if not level.phi_classes:
            raise DependencyError(f"order-{n} result carries no φ-class data")
        D = frozenset(_adv_of(p) for p in level.phi_classes)
    else:
        raise DependencyError(f"spectrum of order {n} needs the order-{n - 1} "
                              f"φ-representatives or the order-{n} classification")
    rep = SpectrumReport(n, D, first_missing_positive(D), max(D))
    if level is None and prev_level is not None and prev_level.phi_classes:
        census = extension_det_census(prev_level)
        rep.m = sum(c for v, c in census.items() if v)
        rep.c = _det_sign_halving(n, census[rep.d])
    if level is not None:
        if not level.phi_classes:
            raise DependencyError(f"order-{n} result carries no φ-class data")
        census = {k: 0 for k in range(n + 1)}
        top = 0
        regular = 0
        for p in level.phi_classes:
            census[p.snf.rank] += p.matrices
            adv = _adv_of(p)
            if adv:
                regular += p.matrices
            if adv == rep.d:
                top += p.matrices
        rep.rank_census = census
        rep.m = regular
        rep.c = _det_sign_halving(n, top)
    return rep


def phi_class_size(a: BitMatrix) -> int:
    """Number of matrices in the φ-class of ``a``."""
    from .canon import pi_representative
    nf2 = factorial(a.order) ** 2
    return sum(nf2 // pi_representative(r).count for r in phi_orbit_pi_reps(a))


def max_det_count_from_extensions(prev_level: LevelResult, d: int | None = None) -> tuple[int, list[BitMatrix]]:
    """Count of order-n matrices with ``det = d_n`` found through extensions alone.

    Every φ-class of order n contains an extension of an order-(n-1)
    φ-representative and |det| is a φ-invariant, so collecting the extensions
    with maximal |det| and summing the sizes of their distinct φ-classes gives
    the number of matrices with |det| = d_n.  Returns (c_n, φ-representatives).
    """
    m = prev_level.order
    n = m + 1
    if n > KERNEL_MAX_ORDER:
        raise DependencyError(f"order {n} exceeds the canonical-form kernel")
    if d is None:
        d = max(dets_from_extensions(prev_level.phi_reps, m))
    hits: set[tuple[int, ...]] = set()
    words = np.arange(1 << m, dtype=np.int64)
    for base in prev_level.phi_reps:
        det, adj = _kernels.det_adj(np.ascontiguousarray(base), m)
        bits = (words[:, None] >> np.arange(m - 1, -1, -1)) & 1
        core = bits @ adj @ bits.T  # core[x, y] = x adj y
        for b, vals in ((0, -core), (1, det - core)):
            xs, ys = np.nonzero(np.abs(vals) == d)
            for x, y in zip(xs.tolist(), ys.tolist()):
                rows = [((int(r) << 1) | ((y >> (m - 1 - i)) & 1)) for i, r in enumerate(base)]
                rows.append((x << 1) | b)
                hits.add(tuple(rows))
    if not hits:
        return 0, []
    batch = np.array(sorted(hits), dtype=np.int64)
    reps, _ = _kernels.canon_batch(batch, n, True)
    phis = sorted({phi_representative(to_bitmatrix(r, n)) for r in np.unique(reps, axis=0)},
                  key=BitMatrix.key)
    total = sum(phi_class_size(p) for p in phis)
    return _det_sign_halving(n, total), phis


# -- incidence -----------------------------------------------------------------

ONE = "one"
ZERO_EXPLAINED = "zero_explained"
ZERO_UNEXPLAINED = "zero_unexplained"

GLYPHS = {ONE: "•", ZERO_EXPLAINED: "⋆", ZERO_UNEXPLAINED: "∘"}
ASCII_GLYPHS = {ONE: "1", ZERO_EXPLAINED: "x", ZERO_UNEXPLAINED: "o"}


def _prefix_products(s: Sequence[int]) -> list[int]:
    out = []
    p = 1
    for v in s:
        p *= v
        out.append(p)
    return out


def lemma_allows(s: SnfVector, s_prime: SnfVector) -> bool:
    """Whether an order-n Smith form may extend to the order-(n+1) one.

    Three necessary conditions: the rank grows by at most two; for ``i`` up
    to the rank of ``s`` the product of the first ``i`` invariants of
    ``s_prime`` divides that of ``s``; and the product of the first ``n-1``
    invariants of ``s`` divides the determinant of the extension.
    """
    n = len(s)
    if len(s_prime) != n + 1:
        raise ValueError("second Smith form must be one order larger")
    r, r2 = s.rank, s_prime.rank
    if not r <= r2 <= r + 2:
        return False
    ps, pt = _prefix_products(s.diag), _prefix_products(s_prime.diag)
    for i in range(r):
        if ps[i] % pt[i]:
            return False
    head = ps[n - 2] if n >= 2 else 1
    det = s_prime.adv if r2 == n + 1 else 0
    if head == 0:
        return det == 0
    return det % head == 0


@dataclass
class IncidenceMatrix:
    order: int
    from_snfs: list[SnfVector]
    to_snfs: list[SnfVector]
    cells: dict[tuple[SnfVector, SnfVector], str] = field(default_factory=dict)
    discrepancies: list[str] = field(default_factory=list)

    def cell(self, s: SnfVector, s_prime: SnfVector) -> str:
        return self.cells[(s, s_prime)]

    def render(self, ascii_only: bool = False) -> str:
        glyph = ASCII_GLYPHS if ascii_only else GLYPHS
        lines = ["\t" + "\t".join(t.short() for t in self.to_snfs)]
        for s in self.from_snfs:
            lines.append(s.short() + "\t" + "\t".join(glyph[self.cells[(s, t)]] for t in self.to_snfs))
        return "\n".join(lines) + "\n"


def incidence_from_witnesses(n: int, witnessed: dict[SnfVector, set[SnfVector]],
                             to_snfs: Iterable[SnfVector] | None = None) -> IncidenceMatrix:
    froms = sorted(witnessed, key=SnfVector.sort_key)
    targets = set().union(*witnessed.values()) if witnessed else set()
    if to_snfs is not None:
        targets |= set(to_snfs)
    tos = sorted(targets, key=SnfVector.sort_key)
    inc = IncidenceMatrix(n, froms, tos)
    for s in froms:
        for t in tos:
            if t in witnessed[s]:
                inc.cells[(s, t)] = ONE
            elif lemma_allows(s, t):
                inc.cells[(s, t)] = ZERO_UNEXPLAINED
            else:
                inc.cells[(s, t)] = ZERO_EXPLAINED
    return inc


def incidence(level: LevelResult, mode: str = "phi") -> IncidenceMatrix:
    """Incidence between the Smith forms of order n and n+1.

    ``mode="phi"`` extends every φ-representative of each class;
    ``mode="representative"`` extends only the recorded class representative
    and lists every cell where that loses a witness.
    """
    n = level.order
    if mode not in ("phi", "representative"):
        raise ValueError(f"unknown incidence mode {mode!r}")
    if not level.phi_classes:
        raise DependencyError(f"order-{n} result carries no φ-class data")
    full: dict[SnfVector, set[SnfVector]] = {r.snf: set() for r in level.records}
    for p in level.phi_classes:
        full[p.snf] |= extension_snf_set(p.rep)
    if mode == "phi":
        return incidence_from_witnesses(n, full)
    reps = {r.snf: extension_snf_set(r.representative) for r in level.records}
    inc = incidence_from_witnesses(n, reps, set().union(*full.values()))
    for s in reps:
        for t in sorted(full[s] - reps[s], key=SnfVector.sort_key):
            inc.discrepancies.append(f"{s.short()} -> {t.short()} missed by the representative")
    return inc


# -- the rank-9 fixture --------------------------------------------------------

COUNTEREXAMPLE_ROWS = (
    "0011101001",
    "0110010101",
    "1100011010",
    "1001100110",
    "0011000111",
    "1100001110",
    "1010011100",
    "0101111000",
    "0110110001",
    "1001100011",
)


def counterexample_matrix() -> BitMatrix:
    return BitMatrix.from_lists([[int(ch) for ch in r] for r in COUNTEREXAMPLE_ROWS])


@dataclass
class CounterexampleReport:
    rank: int
    snf: SnfVector
    minors_with_unit_snf: int
    block_row_sums: tuple[tuple[int, ...], ...]
    block_col_sums: tuple[tuple[int, ...], ...]

    @property
    def ok(self) -> bool:
        return (self.rank == 9 and self.snf == SnfVector((1,) * 9 + (0,))
                and self.minors_with_unit_snf == 0)


def _block_sums(lists: list[list[int]], split: int) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    n = len(lists)
    blocks = [(0, split, 0, split), (0, split, split, n), (split, n, 0, split), (split, n, split, n)]
    rows, cols = [], []
    for r0, r1, c0, c1 in blocks:
        rows.append(tuple(sorted({sum(lists[i][c0:c1]) for i in range(r0, r1)})))
        cols.append(tuple(sorted({sum(lists[i][j] for i in range(r0, r1)) for j in range(c0, c1)})))
    return tuple(rows), tuple(cols)


def verify_counterexample(f: BitMatrix | None = None, split: int = 4) -> CounterexampleReport:
    """Rank, Smith form and order-(n-1) minors of the fixture (or of ``f``)."""
    f = counterexample_matrix() if f is None else f
    lists = f.to_lists()
    unit = SnfVector((1,) * (f.order - 1))
    hits = 0
    for i in range(f.order):
        for j in range(f.order):
            if smith_normal_form(minor(lists, i, j)) == unit:
                hits += 1
    rs, cs = _block_sums(lists, split)
    return CounterexampleReport(rank(f), smith_normal_form(f), hits, rs, cs)


# -- extremal matrices -----------------------------------------------------------

EXTREMAL = {
    3: (3, "3,5,9,E"),
    4: (5, "3,5,E,16,19"),
    5: (9, "3,D,15,1A,26,39"),
    6: (18, "7,19,2A,34,4C,53,65"),
    7: (40, "7,19,2A,56,65,9C,B3,CB"),
    8: (105, "7,39,5A,AC,D5,E3,136,14D,19B"),
}


def extremal_check(n: int) -> tuple[int, BitMatrix | None]:
    """|det| of the listed order-(n+1) matrix, and a permuted copy whose
    leading order-n minor has |det| 1 (``None`` if no such minor exists).

    The listed matrices are canonical forms, so the unimodular minor need not
    sit in the top-left corner; moving the deleted row and column to the end
    puts it there without changing |det|.
    """
    _, text = EXTREMAL[n]
    a = from_hex(text)
    lists = a.to_lists()
    for i in range(n + 1):
        for j in range(n + 1):
            if abs(determinant(minor(lists, i, j))) == 1:
                rows = [r for k, r in enumerate(lists) if k != i] + [lists[i]]
                cols = [c for c in range(n + 1) if c != j] + [j]
                return abs(determinant(a)), BitMatrix.from_lists([[r[c] for c in cols] for r in rows])
    return abs(determinant(a)), None
