"""Bordered extensions of a base matrix.

An extension of an order-m matrix ``B`` is the order-(m+1) matrix with ``B``
in the top-left corner, a new right column ``y``, a new bottom row ``x`` and
corner bit ``b``.  Expanding along the border gives

    det = b * det(B) - x . adj(B) . y

so once the adjugate is known every determinant is a sum of adjugate entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import _kernels
from .bitmat import BitMatrix
from .exact import adjugate, determinant
from .snf import SnfVector, smith_normal_form, snf_decomposition, snf_of_extension

# Orders whose extension determinants the int64 kernel computes exactly.
KERNEL_DET_ORDER = 20


@dataclass(frozen=True, slots=True)
class ExtensionSpectrum:
    base: BitMatrix
    covered: frozenset[int]
    first_missing: int


def bordered(base: BitMatrix, x: int, y: int, b: int) -> BitMatrix:
    """The extension with bottom row ``x``, right column ``y`` and corner ``b``."""
    m = base.order
    rows = [(r << 1) | ((y >> (m - 1 - i)) & 1) for i, r in enumerate(base.rows)]
    rows.append((x << 1) | b)
    return BitMatrix(m + 1, tuple(rows))


def _bits(word: int, m: int) -> np.ndarray:
    return np.array([(word >> (m - 1 - i)) & 1 for i in range(m)], dtype=np.int64)


def _all_words(m: int) -> np.ndarray:
    """Row ``w`` holds the bits of ``w``, most significant first."""
    w = np.arange(1 << m, dtype=np.int64)[:, None]
    return (w >> np.arange(m - 1, -1, -1, dtype=np.int64)) & 1


def enumerate_extension_dets(base: BitMatrix) -> Iterator[tuple[int, int, int, int]]:
    """Yield ``(x, y, b, det)`` for every extension of ``base``.

    For each ``(x, b)`` the column ``y`` runs through the reflected Gray code,
    so each step adds or removes one adjugate contribution.
    """
    m = base.order
    if m < 1:
        raise ValueError("base order must be at least 1")
    d = determinant(base)
    adj = adjugate(base).entries
    for x in range(1 << m):
        xb = _bits(x, m)
        # u[j] = sum_i x_i adj[i][j]
        u = [sum(int(xb[i]) * adj[i][j] for i in range(m)) for j in range(m)]
        for b in (0, 1):
            acc = 0
            y = 0
            yield x, y, b, b * d
            for k in range(1, 1 << m):
                j = (k & -k).bit_length() - 1  # bit that flips
                col = m - 1 - j
                y ^= 1 << j
                acc += u[col] if (y >> j) & 1 else -u[col]
                yield x, y, b, b * d - acc


def extension_dets(base: BitMatrix) -> np.ndarray:
    """All extension determinants as an array indexed ``[b, x, y]``."""
    m = base.order
    d = determinant(base)
    adj = np.array(adjugate(base).entries, dtype=np.int64)
    w = _all_words(m)
    core = w @ adj @ w.T
    return np.stack([-core, d - core])


def _first_missing(values: np.ndarray) -> int:
    u = np.unique(values)
    # u is sorted and starts at 0 whenever 0 is present
    hits = np.nonzero(u != np.arange(len(u)))[0]
    return int(hits[0]) if len(hits) else len(u)


def extension_spectrum(base: BitMatrix) -> ExtensionSpectrum:
    """Absolute determinants over all extensions and the least one missing."""
    if 1 <= base.order <= KERNEL_DET_ORDER:
        vals = _kernels.extension_abs_dets(np.array(base.rows, dtype=np.int64), base.order)
    else:
        vals = np.abs(extension_dets(base)).ravel()
    return ExtensionSpectrum(base, frozenset(int(v) for v in np.unique(vals)), _first_missing(vals))


def extension_snf_set(base: BitMatrix) -> set[SnfVector]:
    """Smith forms of all extensions, from one decomposition of ``base``.

    With ``P B Q = diag(d)`` the extension is equivalent to the diagonal
    bordered by ``a = x Q``, ``c = P y`` and a corner; after clearing the unit
    invariants and reducing the rest modulo their ``d_i`` only a handful of
    distinct residual problems remain, and each is solved once.
    """
    m = base.order
    dec = snf_decomposition(base)
    d = dec.D.diag
    bound = max((abs(v) for row in dec.P.entries + dec.Q.entries for v in row), default=0)
    if bound * m > 1 << 20:
        return extension_snf_set_direct(base)
    k = sum(1 for v in d if v == 1)
    P = np.array(dec.P.entries, dtype=np.int64)
    Q = np.array(dec.Q.entries, dtype=np.int64)
    w = _all_words(m)
    a = w @ Q            # a[x] = x Q
    c = w @ P.T          # c[y] = P y
    corner = -(a[:, :k] @ c[:, :k].T)
    ta = a[:, k:].copy()
    tc = c[:, k:].copy()
    for i, di in enumerate(d[k:]):
        if di > 1:
            qc, tc[:, i] = np.divmod(tc[:, i], di)
            corner -= np.multiply.outer(ta[:, i], qc)
            qa, ta[:, i] = np.divmod(ta[:, i], di)
            corner -= np.multiply.outer(qa, tc[:, i])
    r = m - k
    size = 1 << m
    keys = np.empty((2, size, size, 2 * r + 1), dtype=np.int64)
    keys[..., :r] = ta[None, :, None, :]
    keys[..., r:2 * r] = tc[None, None, :, :]
    keys[0, ..., 2 * r] = corner
    keys[1, ..., 2 * r] = corner + 1
    out: set[SnfVector] = set()
    for key in np.unique(keys.reshape(-1, 2 * r + 1), axis=0):
        R = [[0] * (r + 1) for _ in range(r + 1)]
        for i in range(r):
            R[i][i] = d[k + i]
            R[i][r] = int(key[r + i])
            R[r][i] = int(key[i])
        R[r][r] = int(key[2 * r])
        out.add(SnfVector((1,) * k + smith_normal_form(R).diag))
    return out


def extension_snf_set_direct(base: BitMatrix) -> set[SnfVector]:
    """Same as :func:`extension_snf_set`, one incremental SNF per extension."""
    m = base.order
    dec = snf_decomposition(base)
    return {snf_of_extension(dec, x, y, b)
            for y in range(1 << m) for x in range(1 << m) for b in (0, 1)}


def fibonacci_matrix(n: int) -> BitMatrix:
    """Ones on the subdiagonal, the diagonal and every even superdiagonal."""
    if n < 1:
        raise ValueError("order must be at least 1")
    rows = []
    for i in range(n):
        w = 0
        for j in range(n):
            k = j - i
            if k == -1 or (k >= 0 and k % 2 == 0):
                w |= 1 << (n - 1 - j)
        rows.append(w)
    return BitMatrix(n, tuple(rows))


def fibonacci_number(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a
