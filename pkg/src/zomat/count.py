"""Exact counting formulas, all in Python integers."""

from __future__ import annotations

from functools import lru_cache
from math import factorial, gcd
from typing import Iterator


def _partitions(n: int, largest: int | None = None) -> Iterator[list[int]]:
    """Partitions of ``n`` as non-increasing part lists."""
    if largest is None:
        largest = n
    if n == 0:
        yield []
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield [k] + rest


def _cycle_types(n: int) -> list[tuple[dict[int, int], int]]:
    """(cycle-length multiplicities, number of permutations of that type)."""
    out = []
    nf = factorial(n)
    for parts in _partitions(n):
        mult: dict[int, int] = {}
        for p in parts:
            mult[p] = mult.get(p, 0) + 1
        denom = 1
        for r, i in mult.items():
            denom *= r ** i * factorial(i)
        out.append((mult, nf // denom))
    return out


def pi_class_count(n: int) -> int:
    """Number of (0,1) matrices of order ``n`` up to row and column permutations.

    Burnside over pairs of permutations: a pair with cycle types ``i`` and
    ``j`` fixes ``2 ** sum(i_r * j_s * gcd(r, s))`` matrices.
    """
    if not 1 <= n <= 30:
        raise ValueError("order must be in 1..30")
    types = _cycle_types(n)
    total = 0
    for mi, ci in types:
        for mj, cj in types:
            e = sum(i * j * gcd(r, s) for r, i in mi.items() for s, j in mj.items())
            total += ci * cj << e
    nf = factorial(n)
    return total // (nf * nf)


def rank1_count(n: int) -> int:
    if n < 1:
        raise ValueError("order must be at least 1")
    return (2 ** n - 1) ** 2


def rank2_count(n: int) -> int:
    if n < 1:
        raise ValueError("order must be at least 1")
    return (3 ** n - 2 * 2 ** n + 1) * (2 * 4 ** n - 3 * 3 ** n + 1) // 2


@lru_cache(maxsize=None)
def partitions_at_most(n: int, r: int) -> int:
    """Partitions of ``r`` into at most ``n`` parts."""
    if n < 0 or r < 0:
        raise ValueError("arguments must be nonnegative")
    if r == 0:
        return 1
    if n == 0:
        return 0
    return partitions_at_most(n - 1, r) + (partitions_at_most(n, r - n) if r >= n else 0)


def factorize(d: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= d:
        while d % p == 0:
            out[p] = out.get(p, 0) + 1
            d //= p
        p += 1 if p == 2 else 2
    if d > 1:
        out[d] = out.get(d, 0) + 1
    return out


def snf_count_upper_bound(n: int, d: int) -> int:
    """Upper bound on the number of Smith forms of order ``n`` with product ``d``.

    Each prime power ``p**a`` in ``d`` is spread over the diagonal as a
    partition of ``a`` into at most ``n`` parts.
    """
    if d < 1:
        raise ValueError("determinant value must be positive")
    out = 1
    for a in factorize(d).values():
        out *= partitions_at_most(n, a)
    return out
