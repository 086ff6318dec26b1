"""Exact integer linear algebra for small dense matrices.

Everything here works on Python integers, with every intermediate checked
against a signed 128-bit range so that an out-of-range value raises instead of
silently producing a wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Sequence, Union

from .bitmat import BitMatrix, SignMatrix
from .errors import DimensionError, IntegerOverflowError

INT_BITS = 128
_LIMIT = 1 << (INT_BITS - 1)


@dataclass(frozen=True, slots=True)
class IntMatrix:
    order: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.order or any(len(r) != self.order for r in self.entries):
            raise DimensionError("integer matrix is not square of the declared order")

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]]) -> "IntMatrix":
        return cls(len(rows), tuple(tuple(int(v) for v in r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix.from_lists(matmul(self.to_lists(), other.to_lists()))


AnyMatrix = Union[BitMatrix, SignMatrix, IntMatrix, Sequence[Sequence[int]]]


def as_lists(a: AnyMatrix) -> list[list[int]]:
    if isinstance(a, (BitMatrix, SignMatrix, IntMatrix)):
        return a.to_lists()
    rows = [list(map(int, r)) for r in a]
    if any(len(r) != len(rows) for r in rows):
        raise DimensionError("matrix is not square")
    return rows


def _check(v: int) -> int:
    if not -_LIMIT <= v < _LIMIT:
        raise IntegerOverflowError(f"value needs more than {INT_BITS} bits")
    return v


def matmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    n, m, p = len(a), len(b), len(b[0]) if b else 0
    if a and len(a[0]) != m:
        raise DimensionError("inner dimensions differ")
    bt = list(zip(*b)) if b else [()] * p
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def _bareiss(m: list[list[int]]) -> tuple[int, int]:
    """Fraction-free elimination in place; returns (determinant, rank)."""
    n = len(m)
    if n == 0:
        return 1, 0
    ncols = len(m[0])
    sign = 1
    prev = 1
    rank = 0
    row = 0
    for col in range(ncols):
        if row == n:
            break
        piv = next((r for r in range(row, n) if m[r][col] != 0), None)
        if piv is None:
            continue
        if piv != row:
            m[row], m[piv] = m[piv], m[row]
            sign = -sign
        p = m[row][col]
        for r in range(row + 1, n):
            mr = m[r]
            f = mr[col]
            for c in range(col + 1, ncols):
                mr[c] = _check((p * mr[c] - f * m[row][c]) // prev)
            mr[col] = 0
        prev = p
        row += 1
        rank += 1
    det = sign * m[n - 1][n - 1] if rank == n and ncols == n else 0
    return det, rank


def determinant(a: AnyMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    m = as_lists(a)
    det, _ = _bareiss(m)
    return det


def rank(a: AnyMatrix) -> int:
    """Rank over the rationals."""
    m = as_lists(a)
    _, r = _bareiss(m)
    return r


def rank_rect(rows: Sequence[Sequence[int]]) -> int:
    m = [list(map(int, r)) for r in rows]
    if not m:
        return 0
    _, r = _bareiss(m)
    return r


def minor(m: list[list[int]], i: int, j: int) -> list[list[int]]:
    return [r[:j] + r[j + 1:] for k, r in enumerate(m) if k != i]


def adjugate(a: AnyMatrix) -> IntMatrix:
    """Transposed cofactor matrix; entry (j, i) is the cofactor of entry (i, j).

    Each cofactor is an independent Bareiss determinant, so singular inputs need
    no special handling.
    """
    m = as_lists(a)
    n = len(m)
    if n == 0:
        return IntMatrix(0, ())
    if n == 1:
        return IntMatrix(1, ((1,),))
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            c = determinant(minor(m, i, j))
            adj[j][i] = -c if (i + j) & 1 else c
    return IntMatrix.from_lists(adj)


@dataclass(frozen=True, slots=True)
class HadamardBound:
    order: int
    squared: Fraction  # (n+1)^(n+1) / 4^n, the square of the real bound
    floor: int


def hadamard_bound(n: int) -> HadamardBound:
    """Upper bound on |det| over (0,1) matrices of order ``n``."""
    if n < 1:
        raise ValueError("order must be at least 1")
    num = (n + 1) ** (n + 1)
    return HadamardBound(n, Fraction(num, 4 ** n), isqrt(num) >> n)
