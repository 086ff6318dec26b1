"""Square (0,1) matrices with bit-packed rows.

Row ``i`` is stored as an integer word; column ``j`` (0-based) of that row is
the bit of weight ``2**(n-1-j)``, so the leftmost column is the most
significant bit.  With this layout lexicographic order of matrices is the
order of their row-word sequences, and the hex strings used in the published
tables (``3,5,6`` for the matrix ``[[0,1,1],[1,0,1],[1,1,0]]``) read directly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import ContractError, DimensionError, MatrixFormatError, ParseError

MAX_ORDER = 63

_HEX_TOKEN = re.compile(r"^[0-9A-Fa-f]+$")


@dataclass(frozen=True, slots=True)
class BitMatrix:
    order: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 0 <= self.order <= MAX_ORDER:
            raise MatrixFormatError(f"order {self.order} outside 0..{MAX_ORDER}")
        if len(self.rows) != self.order:
            raise MatrixFormatError(
                f"{len(self.rows)} rows given for a matrix of order {self.order}")
        limit = 1 << self.order
        for r in self.rows:
            if not 0 <= r < limit:
                raise MatrixFormatError(f"row word {r:X} does not fit {self.order} columns")

    @classmethod
    def from_rows(cls, rows: Iterable[int]) -> "BitMatrix":
        rows = tuple(int(r) for r in rows)
        return cls(len(rows), rows)

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]]) -> "BitMatrix":
        n = len(entries)
        words = []
        for row in entries:
            if len(row) != n:
                raise DimensionError("matrix is not square")
            w = 0
            for v in row:
                if v not in (0, 1):
                    raise MatrixFormatError(f"entry {v!r} is not 0 or 1")
                w = (w << 1) | v
            words.append(w)
        return cls(n, tuple(words))

    @classmethod
    def zero(cls, n: int) -> "BitMatrix":
        return cls(n, (0,) * n)

    @classmethod
    def ones(cls, n: int) -> "BitMatrix":
        return cls(n, ((1 << n) - 1,) * n)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, tuple(1 << (n - 1 - i) for i in range(n)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.rows[i] >> (self.order - 1 - j)) & 1

    def to_lists(self) -> list[list[int]]:
        n = self.order
        return [[(r >> (n - 1 - j)) & 1 for j in range(n)] for r in self.rows]

    def to_hex(self) -> list[str]:
        return [format(r, "X") for r in self.rows]

    def hex_line(self) -> str:
        return ",".join(self.to_hex())

    def transpose(self) -> "BitMatrix":
        n = self.order
        cols = []
        for j in range(n):
            shift = n - 1 - j
            w = 0
            for r in self.rows:
                w = (w << 1) | ((r >> shift) & 1)
            cols.append(w)
        return BitMatrix(n, tuple(cols))

    def key(self) -> int:
        """Single integer whose natural order is the lexicographic order."""
        k = 0
        for r in self.rows:
            k = (k << self.order) | r
        return k

    def __lt__(self, other: "BitMatrix") -> bool:
        return lex_compare(self, other) < 0

    def __str__(self) -> str:
        return "\n".join(" ".join(str(v) for v in row) for row in self.to_lists())


@dataclass(frozen=True, slots=True)
class SignMatrix:
    order: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.order or any(len(r) != self.order for r in self.entries):
            raise DimensionError("sign matrix is not square of the declared order")
        if any(v not in (-1, 1) for r in self.entries for v in r):
            raise MatrixFormatError("sign matrix entries must be -1 or +1")

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


@dataclass(frozen=True, slots=True)
class Perm:
    """Permutation of ``0..n-1``; ``images[i]`` is the image of ``i``."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(len(self.images))):
            raise ContractError(f"{self.images} is not a permutation")

    @property
    def order(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(tuple(range(n)))

    def __call__(self, i: int) -> int:
        return self.images[i]

    def inverse(self) -> "Perm":
        inv = [0] * len(self.images)
        for i, p in enumerate(self.images):
            inv[p] = i
        return Perm(tuple(inv))

    def compose(self, other: "Perm") -> "Perm":
        """``self ∘ other``: apply ``other`` first."""
        if other.order != self.order:
            raise DimensionError("permutation orders differ")
        return Perm(tuple(self.images[other.images[i]] for i in range(self.order)))


def from_hex(tokens: Sequence[str] | str) -> BitMatrix:
    """Parse row words given as hex strings (case-insensitive)."""
    if isinstance(tokens, str):
        tokens = [t for t in re.split(r"[,\s]+", tokens.strip().strip("()[]")) if t]
    rows = []
    for t in tokens:
        t = t.strip()
        if not _HEX_TOKEN.match(t):
            raise ParseError(f"not a hex row word: {t!r}")
        rows.append(int(t, 16))
    return BitMatrix.from_rows(rows)


def to_hex(a: BitMatrix) -> list[str]:
    return a.to_hex()


def lex_compare(a: BitMatrix, b: BitMatrix) -> int:
    """Return -1, 0 or 1 as ``a`` is lexicographically below, equal or above ``b``."""
    if a.order != b.order:
        raise DimensionError(f"orders {a.order} and {b.order} differ")
    for x, y in zip(a.rows, b.rows):
        if x != y:
            return -1 if x < y else 1
    return 0


def permute_columns_word(word: int, n: int, q: Sequence[int]) -> int:
    """Row word whose column ``k`` is column ``q[k]`` of ``word``."""
    out = 0
    for k in range(n):
        out = (out << 1) | ((word >> (n - 1 - q[k])) & 1)
    return out


def apply_perms(a: BitMatrix, p: Perm, q: Perm) -> BitMatrix:
    """The matrix ``P A Q``.

    Row ``p(i)`` of the result is row ``i`` of ``a``; column ``k`` of the
    result is column ``q(k)`` of ``a``.
    """
    n = a.order
    if p.order != n or q.order != n:
        raise DimensionError("permutation order does not match the matrix")
    pinv = p.inverse().images
    qi = q.images
    return BitMatrix(n, tuple(permute_columns_word(a.rows[pinv[i]], n, qi) for i in range(n)))


def psi_embed(a: BitMatrix) -> SignMatrix:
    """Map an order-n (0,1) matrix to the order-(n+1) ±1 matrix with det scaled by 2^n.

    Zeros become -1, a top row of -1 is added, and a right column of +1.
    """
    n = a.order
    top = tuple([-1] * n + [1])
    body = [tuple((1 if v else -1) for v in row) + (1,) for row in a.to_lists()]
    return SignMatrix(n + 1, (top, *body))


def psi_inverse(b: SignMatrix) -> BitMatrix:
    """Inverse of :func:`psi_embed` on its image."""
    m = b.order
    if m < 1:
        raise DimensionError("sign matrix of order 0 has no preimage")
    top = b.entries[0]
    if any(v != -1 for v in top[:-1]) or top[-1] != 1 or any(r[-1] != 1 for r in b.entries):
        raise MatrixFormatError("sign matrix is not in the image of the embedding")
    return BitMatrix.from_lists([[1 if v == 1 else 0 for v in r[:-1]] for r in b.entries[1:]])


def xi_row(a: BitMatrix, i: int) -> BitMatrix:
    """Add row ``i`` (1-based) modulo two to every other row; ``i = 0`` is the identity."""
    n = a.order
    if not 0 <= i <= n:
        raise IndexError(f"transform index {i} outside 0..{n}")
    if i == 0:
        return a
    pivot = a.rows[i - 1]
    return BitMatrix(n, tuple(r if k == i - 1 else r ^ pivot for k, r in enumerate(a.rows)))


def xi_col(a: BitMatrix, j: int) -> BitMatrix:
    """Column analogue of :func:`xi_row`."""
    if not 0 <= j <= a.order:
        raise IndexError(f"transform index {j} outside 0..{a.order}")
    if j == 0:
        return a
    return xi_row(a.transpose(), j).transpose()


# -- matrix-set text files ---------------------------------------------------

def format_matrix_line(a: BitMatrix) -> str:
    return a.hex_line()


def parse_matrix_line(line: str) -> BitMatrix:
    return from_hex(line)


def write_matrix_set(path: str | Path, matrices: Iterable[BitMatrix]) -> int:
    """Write matrices one per line; input must already be sorted and distinct."""
    count = 0
    prev: BitMatrix | None = None
    with open(path, "w", encoding="ascii") as fh:
        for a in matrices:
            if prev is not None and lex_compare(prev, a) >= 0:
                raise MatrixFormatError("matrix set must be strictly increasing")
            fh.write(a.hex_line())
            fh.write("\n")
            prev = a
            count += 1
    return count


def iter_matrix_set(path: str | Path) -> Iterator[BitMatrix]:
    with open(path, encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                yield from_hex(line)
            except (ParseError, MatrixFormatError) as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc


def read_matrix_set(path: str | Path) -> list[BitMatrix]:
    return list(iter_matrix_set(path))
