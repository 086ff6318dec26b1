"""Lower bounds for the least positive integer that is not a determinant.

Every integer covered by |det| of some extension of some seed is a
determinant of order n+1, so the least integer not covered bounds ``a_{n+1}``
from below.  Seeds with large determinants and well-spread adjugates cover
the most; the matrices with near-maximal |det| found in one round become the
seeds of the next.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .bitmat import BitMatrix
from .canon import KERNEL_MAX_ORDER
from .classify import to_bitmatrix
from .errors import ContractError
from .exact import determinant, hadamard_bound
from .extend import KERNEL_DET_ORDER, bordered, fibonacci_number

DEFAULT_CAP = 10 ** 4
DEFAULT_BUFFER = 1 << 16

# Seeds whose extensions give the order-10 bound 259: a known order-9 matrix
# with |det| 110 and a one-entry variant of it.
ORDER9_SEEDS = ("7,39,5A,9C,E1,149,174,193,1AA", "47,39,5A,9C,E1,149,174,193,1AA")


def paseman_bound(n: int) -> int:
    """``2 f_{n-1}``, from the extensions of the Fibonacci matrix of order n-1."""
    if n < 2:
        raise ValueError("order must be at least 2")
    return 2 * fibonacci_number(n - 1)


@dataclass
class BoundRun:
    order: int
    seeds: list[BitMatrix]
    first0: int
    dmax: int
    promising: list[BitMatrix] = field(default_factory=list)
    promising_dets: list[int] = field(default_factory=list)
    witnesses: dict[int, tuple[int, int, int, int]] = field(default_factory=dict)
    covered: frozenset[int] = frozenset()
    skipped_columns: int = 0
    dropped: int = 0

    def witness_matrix(self, v: int) -> BitMatrix:
        s, x, y, b = self.witnesses[v]
        return bordered(self.seeds[s], x, y, b)


def heuristic_round(seeds: Sequence[BitMatrix], prune: bool = True, cap: int = DEFAULT_CAP,
                    buffer: int = DEFAULT_BUFFER, canonical: bool = True) -> BoundRun:
    """One sweep over all extensions of ``seeds`` (all of the same order)."""
    seeds = list(seeds)
    if not seeds:
        raise ContractError("at least one seed is required")
    m = seeds[0].order
    if any(s.order != m for s in seeds):
        raise ContractError("seeds must share one order")
    if not 1 <= m <= KERNEL_DET_ORDER:
        raise ContractError(f"seed order must be in 1..{KERNEL_DET_ORDER}")
    n = m + 1
    limit = hadamard_bound(n).floor + 2
    covered = np.zeros(limit, dtype=np.uint8)
    covered[0] = 1
    state = np.array([1, 0, 0, 0], dtype=np.int64)
    witness = np.full((limit, 4), -1, dtype=np.int64)
    prom_rows = np.zeros((buffer, n), dtype=np.int64)
    prom_dets = np.zeros(buffer, dtype=np.int64)
    prom_n = np.zeros(1, dtype=np.int64)
    for idx, s in enumerate(seeds):
        _kernels.bound_sweep(np.array(s.rows, dtype=np.int64), m, idx, prune, covered, state,
                             witness, prom_rows, prom_dets, prom_n)
    first0, dmax = int(state[0]), int(state[1])
    keep = [(int(prom_dets[t]), prom_rows[t]) for t in range(int(prom_n[0]))
            if 10 * prom_dets[t] > 9 * dmax]
    promising, pdets = _curate(keep, n, cap, canonical)
    wit = {v: tuple(int(t) for t in witness[v]) for v in range(1, first0)}
    return BoundRun(n, seeds, first0, dmax, promising, pdets, wit,
                    frozenset(int(v) for v in np.nonzero(covered)[0]),
                    int(state[3]), int(state[2]))


def _curate(items: list[tuple[int, np.ndarray]], n: int, cap: int,
            canonical: bool) -> tuple[list[BitMatrix], list[int]]:
    """Deduplicate (up to row/column permutation when possible), sort, cap."""
    if not items:
        return [], []
    dets = np.array([d for d, _ in items], dtype=np.int64)
    rows = np.array([r for _, r in items], dtype=np.int64).reshape(-1, n)
    if canonical and n <= KERNEL_MAX_ORDER:
        rows, _ = _kernels.canon_batch(rows, n, True)
    uniq, idx = np.unique(rows, axis=0, return_index=True)
    order = sorted(range(len(uniq)), key=lambda i: (-int(dets[idx[i]]), tuple(uniq[i])))[:cap]
    return [to_bitmatrix(uniq[i], n) for i in order], [int(dets[idx[i]]) for i in order]


def verify_witnesses(run: BoundRun) -> list[int]:
    """Integers below the bound whose witness does not reproduce them."""
    bad = []
    for v in range(1, run.first0):
        if v not in run.witnesses or abs(determinant(run.witness_matrix(v))) != v:
            bad.append(v)
    return bad


def iterate_bounds(seeds: Sequence[BitMatrix], rounds: int, cap: int = DEFAULT_CAP,
                   prune: bool = True) -> tuple[list[tuple[int, int]], list[BoundRun]]:
    """Chain rounds, feeding each round's promising matrices to the next."""
    if rounds < 1:
        raise ContractError("rounds must be at least 1")
    out: list[tuple[int, int]] = []
    runs: list[BoundRun] = []
    current = list(seeds)
    for _ in range(rounds):
        if not current:
            break
        run = heuristic_round(current, prune=prune, cap=cap)
        runs.append(run)
        out.append((run.order, run.first0))
        current = run.promising
    return out, runs
