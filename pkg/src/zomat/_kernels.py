"""Compiled inner loops.

Matrices are int64 arrays of row words (column ``j`` of an order-``n`` row is
bit ``n-1-j``).  The canonical-form search here is the iterative twin of the
recursive search in :mod:`zomat.canon`; the two are cross-checked in the tests.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit(cache=True, nogil=True)
def _row_key(r, cls_row, nc):
    key = np.int64(0)
    one = np.int64(1)
    for k in range(nc):
        c = cls_row[k]
        key = (key << popcount(c)) | ((one << popcount(r & c)) - 1)
    return key


@njit(cache=True, nogil=True)
def _symmetric(rows, n, level, cls, ncls, used):
    l = n - level
    u = used[level]
    special = -1
    for k in range(ncls[level]):
        c = cls[level, k]
        all0 = True
        allc = True
        for j in range(n):
            if (u >> j) & 1:
                continue
            v = rows[j] & c
            if v != 0:
                all0 = False
            if v != c:
                allc = False
        if not (all0 or allc):
            if special >= 0:
                return False
            special = k
    if special < 0:
        return True
    c = cls[level, special]
    if popcount(c) != l:
        return False
    s = -1
    for j in range(n):
        if (u >> j) & 1:
            continue
        pc = popcount(rows[j] & c)
        if s < 0:
            s = pc
        elif pc != s:
            return False
    if s != 1 and s != l - 1:
        return False
    bits = c
    while bits:
        low = bits & -bits
        tot = 0
        for j in range(n):
            if ((u >> j) & 1) == 0 and (rows[j] & low) != 0:
                tot += 1
        if tot != s:
            return False
        bits ^= low
    return True


@njit(cache=True, nogil=True)
def _expand(level, rows, n, symmetry, best, bestset, cls, ncls, cand, ncand, cpos, mult,
            used, keys, cnt):
    u = used[level]
    nc = ncls[level]
    top = np.int64(-1)
    for j in range(n):
        if (u >> j) & 1 == 0:
            k = _row_key(rows[j], cls[level], nc)
            keys[j] = k
            if top < 0 or k < top:
                top = k
    cpos[level] = 0
    mult[level] = 1
    if bestset[level] and top > best[level]:
        ncand[level] = 0
        return
    if (not bestset[level]) or top < best[level]:
        best[level] = top
        bestset[level] = True
        for t in range(level + 1, n):
            bestset[t] = False
        cnt[0] = 0
    m = 0
    for j in range(n):
        if (u >> j) & 1 == 0 and keys[j] == top:
            cand[level, m] = j
            m += 1
    ncand[level] = m
    l = n - level
    if symmetry and m == l and l > 1 and _symmetric(rows, n, level, cls, ncls, used):
        ncand[level] = 1
        mult[level] = l


@njit(cache=True, nogil=True)
def _search(rows, n, symmetry, d0, best, bestset, chosen, cls, ncls, cand, ncand, cpos, mult,
            weight, used, keys, fact, out_p, out_q, cnt):
    """Depth-first search from a node at depth ``d0`` whose state is already set up."""
    level = d0
    _expand(level, rows, n, symmetry, best, bestset, cls, ncls, cand, ncand, cpos, mult,
            used, keys, cnt)
    while True:
        if cpos[level] < ncand[level]:
            j = cand[level, cpos[level]]
            cpos[level] += 1
            chosen[level] = j
            r = rows[j]
            t = 0
            for k in range(ncls[level]):
                c = cls[level, k]
                z = c & ~r
                o = c & r
                if z != 0:
                    cls[level + 1, t] = z
                    t += 1
                if o != 0:
                    cls[level + 1, t] = o
                    t += 1
            ncls[level + 1] = t
            used[level + 1] = used[level] | (np.int64(1) << j)
            weight[level + 1] = weight[level] * mult[level]
            if level + 1 == n:
                leaves = weight[n]
                for k in range(t):
                    leaves *= fact[popcount(cls[n, k])]
                if cnt[0] == 0:
                    for i in range(n):
                        out_p[i] = chosen[i]
                    pos = 0
                    for k in range(t):
                        c = cls[n, k]
                        for jj in range(n):
                            if (c >> (n - 1 - jj)) & 1:
                                out_q[pos] = jj
                                pos += 1
                cnt[0] += leaves
            else:
                level += 1
                _expand(level, rows, n, symmetry, best, bestset, cls, ncls, cand, ncand, cpos,
                        mult, used, keys, cnt)
        else:
            if level == d0:
                break
            level -= 1


@njit(cache=True, nogil=True)
def _fact_table(n):
    f = np.ones(n + 1, dtype=np.int64)
    for i in range(2, n + 1):
        f[i] = f[i - 1] * i
    return f


@njit(cache=True, nogil=True)
def _canon_into(rows, n, symmetry, fact, best, bestset, chosen, cls, ncls, cand, ncand, cpos,
                mult, weight, used, keys, out_p, out_q, cnt):
    for i in range(n):
        bestset[i] = False
    cnt[0] = 0
    cls[0, 0] = (np.int64(1) << n) - 1
    ncls[0] = 1
    weight[0] = 1
    used[0] = 0
    _search(rows, n, symmetry, 0, best, bestset, chosen, cls, ncls, cand, ncand, cpos, mult,
            weight, used, keys, fact, out_p, out_q, cnt)


@njit(cache=True, nogil=True)
def canon_one(rows, n, symmetry):
    """Canonical form of one matrix: (rep rows, pair count, row order, column order)."""
    fact = _fact_table(n)
    best = np.zeros(n, dtype=np.int64)
    bestset = np.zeros(n, dtype=np.bool_)
    chosen = np.zeros(n, dtype=np.int64)
    cls = np.zeros((n + 1, n), dtype=np.int64)
    ncls = np.zeros(n + 1, dtype=np.int64)
    cand = np.zeros((n + 1, n), dtype=np.int64)
    ncand = np.zeros(n + 1, dtype=np.int64)
    cpos = np.zeros(n + 1, dtype=np.int64)
    mult = np.ones(n + 1, dtype=np.int64)
    weight = np.ones(n + 1, dtype=np.int64)
    used = np.zeros(n + 1, dtype=np.int64)
    keys = np.zeros(n, dtype=np.int64)
    out_p = np.zeros(n, dtype=np.int64)
    out_q = np.zeros(n, dtype=np.int64)
    cnt = np.zeros(1, dtype=np.int64)
    _canon_into(rows, n, symmetry, fact, best, bestset, chosen, cls, ncls, cand, ncand, cpos,
                mult, weight, used, keys, out_p, out_q, cnt)
    return best, cnt[0], out_p, out_q


@njit(cache=True, nogil=True)
def canon_batch(mats, n, symmetry):
    """Canonical forms and pair counts for each row of ``mats`` (shape ``(B, n)``)."""
    b = mats.shape[0]
    reps = np.zeros((b, n), dtype=np.int64)
    counts = np.zeros(b, dtype=np.int64)
    fact = _fact_table(n)
    best = np.zeros(n, dtype=np.int64)
    bestset = np.zeros(n, dtype=np.bool_)
    chosen = np.zeros(n, dtype=np.int64)
    cls = np.zeros((n + 1, n), dtype=np.int64)
    ncls = np.zeros(n + 1, dtype=np.int64)
    cand = np.zeros((n + 1, n), dtype=np.int64)
    ncand = np.zeros(n + 1, dtype=np.int64)
    cpos = np.zeros(n + 1, dtype=np.int64)
    mult = np.ones(n + 1, dtype=np.int64)
    weight = np.ones(n + 1, dtype=np.int64)
    used = np.zeros(n + 1, dtype=np.int64)
    keys = np.zeros(n, dtype=np.int64)
    out_p = np.zeros(n, dtype=np.int64)
    out_q = np.zeros(n, dtype=np.int64)
    cnt = np.zeros(1, dtype=np.int64)
    for t in range(b):
        _canon_into(mats[t], n, symmetry, fact, best, bestset, chosen, cls, ncls, cand, ncand,
                    cpos, mult, weight, used, keys, out_p, out_q, cnt)
        for i in range(n):
            reps[t, i] = best[i]
        counts[t] = cnt[0]
    return reps, counts


# -- X transforms -------------------------------------------------------------

@njit(cache=True, nogil=True)
def xi_row_into(src, n, i, dst):
    for k in range(n):
        dst[k] = src[k]
    if i == 0:
        return
    piv = src[i - 1]
    for k in range(n):
        if k != i - 1:
            dst[k] = src[k] ^ piv


@njit(cache=True, nogil=True)
def xi_col_inplace(rows, n, j):
    if j == 0:
        return
    bit = np.int64(1) << (n - j)
    flip = ((np.int64(1) << n) - 1) ^ bit
    for k in range(n):
        if rows[k] & bit:
            rows[k] ^= flip


@njit(cache=True, nogil=True)
def phi_images(rows, n):
    """All ``X_i A X_j`` for ``0 <= i, j <= n``, shape ``((n+1)^2, n)``."""
    out = np.zeros(((n + 1) * (n + 1), n), dtype=np.int64)
    tmp = np.zeros(n, dtype=np.int64)
    t = 0
    for i in range(n + 1):
        xi_row_into(rows, n, i, tmp)
        for j in range(n + 1):
            for k in range(n):
                out[t, k] = tmp[k]
            xi_col_inplace(out[t], n, j)
            t += 1
    return out


def phi_orbit(rows, n, symmetry):
    """Distinct π-representatives in the Φ-orbit, sorted, with their pair counts."""
    reps, counts = canon_batch(phi_images(rows, n), n, symmetry)
    uniq, idx = np.unique(reps, axis=0, return_index=True)
    return uniq, counts[idx]


# -- bordered extensions ------------------------------------------------------

@njit(cache=True, nogil=True)
def extension_rows(base, m, x, y, b, out):
    """Fill ``out`` with the order-(m+1) matrix ``[[B, y], [x, b]]``."""
    for i in range(m):
        out[i] = (base[i] << 1) | ((y >> (m - 1 - i)) & 1)
    out[m] = (x << 1) | b


@njit(cache=True, nogil=True)
def extend_canon(base, m, symmetry):
    """π-representatives and pair counts of every extension of ``base``.

    Extensions are listed with ``y`` outermost, then ``x``, then ``b``.
    """
    n = m + 1
    total = 1 << (2 * m + 1)
    reps = np.zeros((total, n), dtype=np.int64)
    counts = np.zeros(total, dtype=np.int64)
    fact = _fact_table(n)
    best = np.zeros(n, dtype=np.int64)
    bestset = np.zeros(n, dtype=np.bool_)
    chosen = np.zeros(n, dtype=np.int64)
    cls = np.zeros((n + 1, n), dtype=np.int64)
    ncls = np.zeros(n + 1, dtype=np.int64)
    cand = np.zeros((n + 1, n), dtype=np.int64)
    ncand = np.zeros(n + 1, dtype=np.int64)
    cpos = np.zeros(n + 1, dtype=np.int64)
    mult = np.ones(n + 1, dtype=np.int64)
    weight = np.ones(n + 1, dtype=np.int64)
    used = np.zeros(n + 1, dtype=np.int64)
    keys = np.zeros(n, dtype=np.int64)
    out_p = np.zeros(n, dtype=np.int64)
    out_q = np.zeros(n, dtype=np.int64)
    cnt = np.zeros(1, dtype=np.int64)
    mat = np.zeros(n, dtype=np.int64)
    t = 0
    for y in range(1 << m):
        for x in range(1 << m):
            for b in range(2):
                extension_rows(base, m, x, y, b, mat)
                _canon_into(mat, n, symmetry, fact, best, bestset, chosen, cls, ncls, cand,
                            ncand, cpos, mult, weight, used, keys, out_p, out_q, cnt)
                for i in range(n):
                    reps[t, i] = best[i]
                counts[t] = cnt[0]
                t += 1
    return reps, counts


@njit(cache=True, nogil=True)
def extend_canon_warm(base, m, symmetry, cap):
    """Same output as :func:`extend_canon`, resuming each search part-way down.

    For a fixed right column ``y`` the first rows of the representative are
    decided by the ``m`` fixed rows alone until the inserted row ``[x b]``
    first ties or beats them.  The optimal-prefix nodes of the fixed rows are
    computed once per ``y`` (up to ``cap`` nodes per depth), and each inserted
    row resumes the search from all nodes at its entry depth.  A row's entry
    depth is at least that of every row obtained by clearing one of its ones,
    since clearing a one never increases the row's key.
    """
    n = m + 1
    total = 1 << (2 * m + 1)
    reps = np.zeros((total, n), dtype=np.int64)
    counts = np.zeros(total, dtype=np.int64)
    fact = _fact_table(n)
    best = np.zeros(n, dtype=np.int64)
    bestset = np.zeros(n, dtype=np.bool_)
    chosen = np.zeros(n, dtype=np.int64)
    cls = np.zeros((n + 1, n), dtype=np.int64)
    ncls = np.zeros(n + 1, dtype=np.int64)
    cand = np.zeros((n + 1, n), dtype=np.int64)
    ncand = np.zeros(n + 1, dtype=np.int64)
    cpos = np.zeros(n + 1, dtype=np.int64)
    mult = np.ones(n + 1, dtype=np.int64)
    weight = np.ones(n + 1, dtype=np.int64)
    used = np.zeros(n + 1, dtype=np.int64)
    keys = np.zeros(n, dtype=np.int64)
    out_p = np.zeros(n, dtype=np.int64)
    out_q = np.zeros(n, dtype=np.int64)
    cnt = np.zeros(1, dtype=np.int64)
    mat = np.zeros(n, dtype=np.int64)

    big = np.int64(0x7FFFFFFFFFFFFFFF)
    node_cls = np.zeros((n + 1, cap, n), dtype=np.int64)
    node_ncls = np.zeros((n + 1, cap), dtype=np.int64)
    node_used = np.zeros((n + 1, cap), dtype=np.int64)
    node_chosen = np.zeros((n + 1, cap, n), dtype=np.int64)
    nnodes = np.zeros(n + 1, dtype=np.int64)
    fbest = np.zeros(n + 1, dtype=np.int64)
    entry = np.zeros(1 << n, dtype=np.int64)
    full = (np.int64(1) << n) - 1

    t = 0
    for y in range(1 << m):
        extension_rows(base, m, 0, y, 0, mat)
        # optimal-prefix frontier of the fixed rows
        nnodes[0] = 1
        node_cls[0, 0, 0] = full
        node_ncls[0, 0] = 1
        node_used[0, 0] = np.int64(1) << m  # the inserted row is excluded
        depth = 0
        while depth < m:
            top = big
            for v in range(nnodes[depth]):
                u = node_used[depth, v]
                for j in range(m):
                    if (u >> j) & 1 == 0:
                        k = _row_key(mat[j], node_cls[depth, v], node_ncls[depth, v])
                        if k < top:
                            top = k
            fbest[depth] = top
            nxt = 0
            over = False
            for v in range(nnodes[depth]):
                u = node_used[depth, v]
                for j in range(m):
                    if (u >> j) & 1 == 0:
                        k = _row_key(mat[j], node_cls[depth, v], node_ncls[depth, v])
                        if k == top:
                            if nxt == cap:
                                over = True
                                break
                            r = mat[j]
                            c2 = 0
                            for q in range(node_ncls[depth, v]):
                                c = node_cls[depth, v, q]
                                z = c & ~r
                                o = c & r
                                if z != 0:
                                    node_cls[depth + 1, nxt, c2] = z
                                    c2 += 1
                                if o != 0:
                                    node_cls[depth + 1, nxt, c2] = o
                                    c2 += 1
                            node_ncls[depth + 1, nxt] = c2
                            node_used[depth + 1, nxt] = u | (np.int64(1) << j)
                            for q in range(depth):
                                node_chosen[depth + 1, nxt, q] = node_chosen[depth, v, q]
                            node_chosen[depth + 1, nxt, depth] = j
                            nxt += 1
                if over:
                    break
            if over:
                break
            nnodes[depth + 1] = nxt
            depth += 1
        top_depth = depth
        fbest[top_depth] = big if top_depth == m else fbest[top_depth]

        for r in range(1 << n):
            lo = 0
            rr = r
            while rr:
                low = rr & -rr
                e = entry[r ^ low]
                if e > lo:
                    lo = e
                rr ^= low
            l = top_depth
            for d in range(lo, top_depth):
                hit = False
                for v in range(nnodes[d]):
                    if _row_key(r, node_cls[d, v], node_ncls[d, v]) <= fbest[d]:
                        hit = True
                        break
                if hit:
                    l = d
                    break
            entry[r] = l
            mat[m] = r
            for i in range(n):
                bestset[i] = False
            for i in range(l):
                best[i] = fbest[i]
                bestset[i] = True
            cnt[0] = 0
            for v in range(nnodes[l]):
                for i in range(l):
                    chosen[i] = node_chosen[l, v, i]
                nc = node_ncls[l, v]
                for q in range(nc):
                    cls[l, q] = node_cls[l, v, q]
                ncls[l] = nc
                used[l] = node_used[l, v] ^ (np.int64(1) << m)
                weight[l] = 1
                _search(mat, n, symmetry, l, best, bestset, chosen, cls, ncls, cand, ncand, cpos,
                        mult, weight, used, keys, fact, out_p, out_q, cnt)
            x = r >> 1
            b = r & 1
            idx = t + 2 * x + b
            for i in range(n):
                reps[idx, i] = best[i]
            counts[idx] = cnt[0]
        t += 1 << n
    return reps, counts


# -- determinants and adjugates -------------------------------------------------

@njit(cache=True, nogil=True)
def _bareiss_det(m, size):
    """Determinant of the leading ``size x size`` block of ``m`` (destroyed)."""
    if size == 0:
        return np.int64(1)
    sign = np.int64(1)
    prev = np.int64(1)
    for col in range(size):
        piv = -1
        for r in range(col, size):
            if m[r, col] != 0:
                piv = r
                break
        if piv < 0:
            return np.int64(0)
        if piv != col:
            for c in range(size):
                tmp = m[col, c]
                m[col, c] = m[piv, c]
                m[piv, c] = tmp
            sign = -sign
        p = m[col, col]
        for r in range(col + 1, size):
            f = m[r, col]
            for c in range(col + 1, size):
                m[r, c] = (p * m[r, c] - f * m[col, c]) // prev
            m[r, col] = 0
        prev = p
    return sign * m[size - 1, size - 1]


@njit(cache=True, nogil=True)
def _unpack(rows, n, out):
    for i in range(n):
        for j in range(n):
            out[i, j] = (rows[i] >> (n - 1 - j)) & 1


@njit(cache=True, nogil=True)
def det_adj(rows, n):
    """Determinant and adjugate of a (0,1) matrix given as row words.

    Intermediate Bareiss values are minors, so int64 is exact while the
    Hadamard bound squared stays far below 2**63 (orders up to about 20).
    """
    a = np.zeros((n, n), dtype=np.int64)
    _unpack(rows, n, a)
    work = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            work[i, j] = a[i, j]
    det = _bareiss_det(work, n)
    adj = np.zeros((n, n), dtype=np.int64)
    if n == 1:
        adj[0, 0] = 1
        return det, adj
    sub = np.zeros((n - 1, n - 1), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            rr = 0
            for r in range(n):
                if r == i:
                    continue
                cc = 0
                for c in range(n):
                    if c == j:
                        continue
                    sub[rr, cc] = a[r, c]
                    cc += 1
                rr += 1
            v = _bareiss_det(sub, n - 1)
            adj[j, i] = -v if (i + j) & 1 else v
    return det, adj


@njit(cache=True, nogil=True)
def det_batch(mats, n):
    out = np.zeros(mats.shape[0], dtype=np.int64)
    a = np.zeros((n, n), dtype=np.int64)
    for t in range(mats.shape[0]):
        _unpack(mats[t], n, a)
        out[t] = _bareiss_det(a, n)
    return out


@njit(cache=True, nogil=True)
def extension_abs_det_values(base, m):
    """|det| of every extension of ``base``, in no particular order."""
    det, adj = det_adj(base, m)
    size = 1 << m
    # v[y, i] = sum_j adj[i, j] y_j
    v = np.zeros((size, m), dtype=np.int64)
    for y in range(size):
        for i in range(m):
            s = np.int64(0)
            for j in range(m):
                if (y >> (m - 1 - j)) & 1:
                    s += adj[i, j]
            v[y, i] = s
    vals = np.empty(2 * size * size, dtype=np.int64)
    t = 0
    for y in range(size):
        acc = np.int64(0)
        for k in range(size):
            if k:
                low = k & -k
                bit = 0
                while (low >> bit) != 1:
                    bit += 1
                x = k ^ (k >> 1)
                i = m - 1 - bit
                if (x >> bit) & 1:
                    acc += v[y, i]
                else:
                    acc -= v[y, i]
            vals[t] = abs(acc)
            vals[t + 1] = abs(det - acc)
            t += 2
    return vals


def extension_abs_dets(base, m):
    """Sorted distinct |det| over all extensions of ``base``."""
    return np.unique(extension_abs_det_values(base, m))


# -- lower-bound sweep -------------------------------------------------------------

@njit(cache=True, nogil=True)
def bound_sweep(base, m, seed_idx, prune, covered, state, witness, prom_rows, prom_dets, prom_n):
    """Cover |det| values with the extensions of one seed.

    ``state`` holds ``[first0, dmax, dropped, skipped_columns]`` and is
    updated in place.  For each right column ``y`` the reachable |det| range
    is bounded from the positive and negative parts of ``adj(B) y``; columns
    that cannot reach ``first0`` are skipped.  Within a column, the bottom
    row runs through the reflected Gray code.  Extensions with |det| above
    nine tenths of the running maximum go to the promising buffer.
    """
    det, adj = det_adj(base, m)
    size = 1 << m
    limit = covered.shape[0]
    cap = prom_rows.shape[0]
    v = np.zeros(m, dtype=np.int64)
    for y in range(size):
        sp = np.int64(0)
        sn = np.int64(0)
        for i in range(m):
            s = np.int64(0)
            for j in range(m):
                if (y >> (m - 1 - j)) & 1:
                    s += adj[i, j]
            v[i] = s
            if s > 0:
                sp += s
            else:
                sn += s
        reach = max(max(sp, -sn), max(abs(det - sp), abs(det - sn)))
        if prune and reach < state[0]:
            state[3] += 1
            continue
        acc = np.int64(0)
        x = 0
        for k in range(size):
            if k:
                low = k & -k
                bit = 0
                while (low >> bit) != 1:
                    bit += 1
                x ^= low
                i = m - 1 - bit
                if (x >> bit) & 1:
                    acc += v[i]
                else:
                    acc -= v[i]
            for b in range(2):
                val = det - acc if b else -acc
                a = abs(val)
                if a >= limit:
                    continue
                if covered[a] == 0:
                    covered[a] = 1
                    witness[a, 0] = seed_idx
                    witness[a, 1] = x
                    witness[a, 2] = y
                    witness[a, 3] = b
                    while state[0] < limit and covered[state[0]]:
                        state[0] += 1
                if a > state[1]:
                    state[1] = a
                if a > 0 and 10 * a > 9 * state[1]:
                    if prom_n[0] == cap:
                        keep = 0
                        for t in range(cap):
                            if 10 * prom_dets[t] > 9 * state[1]:
                                for q in range(m + 1):
                                    prom_rows[keep, q] = prom_rows[t, q]
                                prom_dets[keep] = prom_dets[t]
                                keep += 1
                        prom_n[0] = keep
                    if prom_n[0] == cap:
                        state[2] += 1
                    else:
                        t = prom_n[0]
                        for i2 in range(m):
                            prom_rows[t, i2] = (base[i2] << 1) | ((y >> (m - 1 - i2)) & 1)
                        prom_rows[t, m] = (x << 1) | b
                        prom_dets[t] = a
                        prom_n[0] += 1
