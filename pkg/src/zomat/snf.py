"""Smith normal form over the integers.

The direct algorithm is the usual pivot-to-corner reduction: move a nonzero
entry of least absolute value to the corner, clear its row and column with
Euclidean steps, and when the corner fails to divide some remaining entry add
that entry's row to the corner row and start over.  The row and column
operations are accumulated so the decomposition ``P A Q = diag(D)`` is
available for the incremental computation on bordered matrices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from .exact import AnyMatrix, IntMatrix, _check, as_lists
from .errors import ContractError, ParseError


@dataclass(frozen=True, slots=True, order=False)
class SnfVector:
    diag: tuple[int, ...]

    def __post_init__(self) -> None:
        if not validate_chain(self.diag):
            raise ContractError(f"{self.diag} is not a valid Smith diagonal")

    def __len__(self) -> int:
        return len(self.diag)

    def __iter__(self):
        return iter(self.diag)

    def __getitem__(self, i):
        return self.diag[i]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diag if d)

    @property
    def adv(self) -> int:
        """Absolute determinant: product of the diagonal."""
        p = 1
        for d in self.diag:
            p *= d
        return p

    def sort_key(self) -> tuple[int, ...]:
        """Report order: zeros moved to the front, then lexicographic."""
        z = len(self.diag) - self.rank
        return (0,) * z + tuple(d for d in self.diag if d)

    def with_zero(self) -> "SnfVector":
        return SnfVector(self.diag + (0,))

    def __str__(self) -> str:
        return "(" + ",".join(str(d) for d in self.diag) + ")"

    def short(self) -> str:
        """Exponential shorthand, e.g. ``(1^3,2,0)``."""
        parts = []
        i = 0
        d = self.diag
        while i < len(d):
            j = i
            while j < len(d) and d[j] == d[i]:
                j += 1
            parts.append(f"{d[i]}^{j - i}" if j - i > 1 else str(d[i]))
            i = j
        return "(" + ",".join(parts) + ")"


@dataclass(frozen=True, slots=True)
class SnfDecomposition:
    P: IntMatrix
    Q: IntMatrix
    D: SnfVector


def validate_chain(v: Sequence[int]) -> bool:
    """True iff entries are nonnegative, zeros form a suffix, and each divides the next."""
    seen_zero = False
    for i, d in enumerate(v):
        if d < 0:
            return False
        if d == 0:
            seen_zero = True
            continue
        if seen_zero:
            return False
        if i and v[i - 1] and d % v[i - 1]:
            return False
    return True


_TOKEN = re.compile(r"^(\d+)(?:\^(\d+))?$")


def parse_snf(text: str) -> SnfVector:
    """Parse ``"(1^3,2,0)"`` style text."""
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    out: list[int] = []
    for tok in filter(None, (t.strip() for t in body.split(","))):
        m = _TOKEN.match(tok)
        if not m:
            raise ParseError(f"bad SNF token {tok!r}")
        out.extend([int(m.group(1))] * int(m.group(2) or 1))
    return SnfVector(tuple(out))


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _reduce(m: list[list[int]], track: bool) -> tuple[list[int], list[list[int]] | None, list[list[int]] | None]:
    n = len(m)
    P = _identity(n) if track else None
    Q = _identity(n) if track else None

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        if track:
            P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for r in m:
            r[i], r[j] = r[j], r[i]
        if track:
            for r in Q:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, f):  # row dst += f * row src
        rd, rs = m[dst], m[src]
        for c in range(n):
            rd[c] = _check(rd[c] + f * rs[c])
        if track:
            pd, ps = P[dst], P[src]
            for c in range(n):
                pd[c] += f * ps[c]

    def add_col(dst, src, f):  # col dst += f * col src
        for r in m:
            r[dst] = _check(r[dst] + f * r[src])
        if track:
            for r in Q:
                r[dst] += f * r[src]

    for t in range(n):
        while True:
            best = None
            for i in range(t, n):
                row = m[i]
                for j in range(t, n):
                    v = row[j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                return _diag(m, t, n), P, Q
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            p = m[t][t]
            dirty = False
            for i in range(t + 1, n):
                v = m[i][t]
                if v:
                    add_row(i, t, -(v // p))
                    if m[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                v = m[t][j]
                if v:
                    add_col(j, t, -(v // p))
                    if m[t][j]:
                        dirty = True
            if dirty:
                continue
            bad = next((i for i in range(t + 1, n) for j in range(t + 1, n) if m[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if m[t][t] < 0:
            m[t] = [-v for v in m[t]]
            if track:
                P[t] = [-v for v in P[t]]
    return _diag(m, n, n), P, Q


def _diag(m: list[list[int]], t: int, n: int) -> list[int]:
    return [m[i][i] for i in range(t)] + [0] * (n - t)


def smith_normal_form(a: AnyMatrix) -> SnfVector:
    m = as_lists(a)
    d, _, _ = _reduce(m, track=False)
    return SnfVector(tuple(d))


def snf_decomposition(a: AnyMatrix) -> SnfDecomposition:
    """Return unimodular ``P``, ``Q`` with ``P A Q = diag(D)``."""
    m = as_lists(a)
    d, P, Q = _reduce(m, track=True)
    return SnfDecomposition(IntMatrix.from_lists(P), IntMatrix.from_lists(Q), SnfVector(tuple(d)))


def _bits(word: int, n: int) -> list[int]:
    return [(word >> (n - 1 - j)) & 1 for j in range(n)]


def extension_residual(dec: SnfDecomposition, x: int, y: int, b: int) -> tuple[int, list[list[int]]]:
    """Reduce the bordered matrix to ``(k, R)``: k leading unit invariants and the residual block.

    ``x`` is the new bottom row and ``y`` the new right column of the border,
    both as words over the ``m`` columns/rows of the base.
    """
    m = dec.D.__len__()
    d = dec.D.diag
    P, Q = dec.P.entries, dec.Q.entries
    xv, yv = _bits(x, m), _bits(y, m)
    a = [sum(xv[i] * Q[i][j] for i in range(m)) for j in range(m)]
    c = [sum(P[i][j] * yv[j] for j in range(m)) for i in range(m)]
    k = 0
    while k < m and d[k] == 1:
        k += 1
    t = b - sum(a[i] * c[i] for i in range(k))
    a = a[k:]
    c = c[k:]
    dd = d[k:]
    for i, di in enumerate(dd):
        if di > 1:
            q, c[i] = divmod(c[i], di)
            t -= q * a[i]
            q, a[i] = divmod(a[i], di)
            t -= q * c[i]
    r = len(dd)
    R = [[0] * (r + 1) for _ in range(r + 1)]
    for i in range(r):
        R[i][i] = dd[i]
        R[i][r] = c[i]
        R[r][i] = a[i]
    R[r][r] = t
    return k, R


def snf_of_extension(dec: SnfDecomposition, x: int, y: int, b: int) -> SnfVector:
    """SNF of ``[[B, y], [x, b]]`` from a decomposition of ``B``."""
    if b not in (0, 1):
        raise ContractError("corner entry must be 0 or 1")
    m = len(dec.D)
    if x >> m or y >> m or x < 0 or y < 0:
        raise ContractError("border word does not fit the base order")
    if dec.P.order != m or dec.Q.order != m:
        raise ContractError("decomposition matrices do not match the diagonal length")
    k, R = extension_residual(dec, x, y, b)
    if len(R) == 1:
        tail = (abs(R[0][0]),)
    elif len(R) == 2:
        tail = _snf2(R)
    else:
        tail = smith_normal_form(R).diag
    return SnfVector((1,) * k + tuple(tail))


def _snf2(R: list[list[int]]) -> tuple[int, int]:
    g = gcd(gcd(R[0][0], R[0][1]), gcd(R[1][0], R[1][1]))
    if g == 0:
        return (0, 0)
    det = abs(R[0][0] * R[1][1] - R[0][1] * R[1][0])
    return (g, det // g)


def snfs_of(matrices: Iterable[AnyMatrix]) -> list[SnfVector]:
    return [smith_normal_form(a) for a in matrices]
