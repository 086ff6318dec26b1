"""Canonical representatives under row/column permutations and the X transforms.

The π-representative of ``A`` is the lexicographically smallest matrix
``P A Q``.  It is found by a branch-and-bound search over row choices: with the
first ``i`` rows fixed, the columns split into classes whose prefixes agree,
and a remaining row can only be placed next after moving its ones to the right
end of every class.  Rows whose placed form is largest are pruned; ties are
all explored, and leaves equal to the current best are counted.

The count reported with a representative is the number of pairs ``(P, Q)``
with ``P A Q`` equal to it.  Each leaf of the search fixes ``P``; the column
permutations that realise that leaf are the permutations within the final
classes of identical columns, so a leaf contributes ``prod(|class|!)``.

A symmetry shortcut keeps highly symmetric inputs such as ``I_n`` linear: when
the remaining rows agree on every column class except possibly one square
class holding a permutation matrix or its complement, all remaining rows lead
to isomorphic subtrees, so only one is explored and its leaves are weighted by
the number of remaining rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Sequence

import numpy as np

from . import _kernels
from .bitmat import BitMatrix, Perm, xi_col, xi_row

# The compiled kernel keeps counts in int64, which holds 12!^2 but not 13!^2.
KERNEL_MAX_ORDER = 12


@dataclass(frozen=True, slots=True)
class CanonicalCert:
    rep: BitMatrix
    P: Perm
    Q: Perm
    count: int


class _Search:
    __slots__ = ("rows", "n", "symmetry", "best", "count", "P", "Q")

    def __init__(self, rows: Sequence[int], n: int, symmetry: bool):
        self.rows = list(rows)
        self.n = n
        self.symmetry = symmetry
        self.best: list[int | None] = [None] * n
        self.count = 0
        self.P: list[int] = []
        self.Q: list[int] = []

    def row_key(self, r: int, classes: list[int]) -> int:
        key = 0
        for c in classes:
            key = (key << c.bit_count()) | ((1 << (r & c).bit_count()) - 1)
        return key

    def symmetric(self, remaining: list[int], classes: list[int]) -> bool:
        l = len(remaining)
        special = None
        for c in classes:
            vals = [self.rows[j] & c for j in remaining]
            if all(v == 0 for v in vals) or all(v == c for v in vals):
                continue
            if special is not None:
                return False
            special = (c, vals)
        if special is None:
            return True
        c, vals = special
        if c.bit_count() != l:
            return False
        s = vals[0].bit_count()
        if s not in (1, l - 1) or any(v.bit_count() != s for v in vals):
            return False
        bit = c
        while bit:
            low = bit & -bit
            if sum(1 for v in vals if v & low) != s:
                return False
            bit ^= low
        return True

    def optimize(self, i: int, chosen: list[int], classes: list[int], weight: int) -> None:
        n = self.n
        if i == n:
            leaves = weight
            for c in classes:
                leaves *= factorial(c.bit_count())
            if self.count == 0:
                self.P = list(chosen)
                self.Q = _column_order(classes, n)
            self.count += leaves
            return
        used = set(chosen)
        remaining = [j for j in range(n) if j not in used]
        keys = {j: self.row_key(self.rows[j], classes) for j in remaining}
        top = min(keys.values())
        cur = self.best[i]
        if cur is not None and top > cur:
            return
        if cur is None or top < cur:
            self.best[i] = top
            for t in range(i + 1, n):
                self.best[t] = None
            self.count = 0
        cands = [j for j in remaining if keys[j] == top]
        mult = 1
        if self.symmetry and len(cands) == len(remaining) > 1 and self.symmetric(remaining, classes):
            mult = len(cands)
            cands = cands[:1]
        for j in cands:
            r = self.rows[j]
            refined = []
            for c in classes:
                z, o = c & ~r, c & r
                if z:
                    refined.append(z)
                if o:
                    refined.append(o)
            chosen.append(j)
            self.optimize(i + 1, chosen, refined, weight * mult)
            chosen.pop()


def _column_order(classes: list[int], n: int) -> list[int]:
    order = []
    for c in classes:
        for j in range(n):
            if c >> (n - 1 - j) & 1:
                order.append(j)
    return order


def _cert_from(a: BitMatrix, best: Sequence[int], chosen: Sequence[int], qcols: Sequence[int],
               count: int) -> CanonicalCert:
    n = a.order
    p = [0] * n
    for pos, src in enumerate(chosen):
        p[src] = pos
    return CanonicalCert(BitMatrix(n, tuple(int(b) for b in best)), Perm(tuple(p)),
                         Perm(tuple(int(q) for q in qcols)), int(count))


def pi_representative_py(a: BitMatrix, symmetry: bool = True) -> CanonicalCert:
    """Reference implementation of the branch-and-bound search (any order)."""
    n = a.order
    if n == 0:
        return CanonicalCert(a, Perm(()), Perm(()), 1)
    s = _Search(a.rows, n, symmetry)
    s.optimize(0, [], [(1 << n) - 1], 1)
    return _cert_from(a, s.best, s.P, s.Q, s.count)


def pi_representative(a: BitMatrix, symmetry: bool = True, engine: str = "auto") -> CanonicalCert:
    """Lexicographically smallest matrix in the row/column permutation orbit of ``a``.

    ``engine`` selects the compiled kernel (``"kernel"``), the pure Python
    search (``"python"``), or the kernel whenever the order allows (``"auto"``).
    """
    n = a.order
    use_kernel = engine == "kernel" or (engine == "auto" and 1 <= n <= KERNEL_MAX_ORDER)
    if engine == "kernel" and not 1 <= n <= KERNEL_MAX_ORDER:
        raise ValueError(f"kernel supports orders 1..{KERNEL_MAX_ORDER}")
    if not use_kernel:
        return pi_representative_py(a, symmetry)
    rows = np.array(a.rows, dtype=np.int64)
    rep, count, chosen, qcols = _kernels.canon_one(rows, n, symmetry)
    return _cert_from(a, rep, chosen, qcols, count)


def row_multiplicity_factor(a: BitMatrix) -> int:
    """Product of factorials of the multiplicities of equal rows."""
    out = 1
    seen: dict[int, int] = {}
    for r in a.rows:
        seen[r] = seen.get(r, 0) + 1
    for k in seen.values():
        out *= factorial(k)
    return out


def pi_class_size(a: BitMatrix, symmetry: bool = True) -> int:
    """Number of matrices permutationally equivalent to ``a``.

    The orbit has ``a_rows * b`` members, where ``a_rows = n!/prod(i_k!)``
    counts distinct row rearrangements and ``b = n!/p`` counts the column
    permutations that change the sorted row multiset.  ``p`` is obtained by
    canonicalising the transpose, transposing back, and canonicalising the
    transpose of that once more: the stabiliser count of that matrix, divided
    by the row-multiplicity factor, is ``p``.
    """
    n = a.order
    if n == 0:
        return 1
    nf = factorial(n)
    rowmult = row_multiplicity_factor(a)
    a_prime = pi_representative(a.transpose(), symmetry).rep.transpose()
    cert = pi_representative(a_prime.transpose(), symmetry)
    # Identical columns of a_prime^T are identical rows of a_prime; those
    # orderings are folded into the pair count but not into p.
    p = cert.count // row_multiplicity_factor(a_prime)
    return (nf // rowmult) * (nf // p)


def orbit_size_from_count(n: int, count: int) -> int:
    return factorial(n) ** 2 // count


def xi_pair(a: BitMatrix, i: int, j: int) -> BitMatrix:
    return xi_col(xi_row(a, i), j)


def phi_orbit_pi_reps(a: BitMatrix, symmetry: bool = True) -> set[BitMatrix]:
    """π-representatives of all ``X_i A X_j``, ``0 <= i, j <= n``."""
    n = a.order
    if 1 <= n <= KERNEL_MAX_ORDER:
        reps, _ = _kernels.phi_orbit(np.array(a.rows, dtype=np.int64), n, symmetry)
        return {BitMatrix(n, tuple(int(v) for v in r)) for r in reps}
    return {pi_representative(xi_pair(a, i, j), symmetry).rep
            for i in range(n + 1) for j in range(n + 1)}


def phi_representative(a: BitMatrix, symmetry: bool = True) -> BitMatrix:
    """Smallest π-representative over the Φ-orbit of ``a``."""
    return min(phi_orbit_pi_reps(a, symmetry), key=BitMatrix.key)
