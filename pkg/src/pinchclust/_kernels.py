"""Compiled inner loops of the ordering search.

All arrays use integer edge weights so boundary arithmetic is exact. An
ordering is an array ``order`` of vertex indices; its profile is stored
padded as ``b[0..n]`` with ``b[0] = b[n] = 0`` and ``b[k]`` the boundary of
the first ``k`` vertices.

Relocating the vertex at position ``p`` to position ``q`` rewrites profile
entries ``q+1..p`` (left move) or ``p+1..q`` (right move), and the rewritten
entry at index ``k`` does not depend on ``q``. Two widths that differ only
in such entries compare like the multisets of differing entries: the width
with fewer copies of the largest value whose count differs is smaller.

The kernels keep those count differences in a table ``tab`` together with
``top``, the largest index holding a nonzero count. The table is indexed by
boundary value when the total weight is small ("direct" mode), otherwise by
rank among the values that can occur while moving the current vertex.
Tracker state lives in local variables; numba cannot keep it in registers
once it is stored in an array.
"""
import numpy as np
from numba import njit

# direct indexing while total integer weight <= DIRECT_FACTOR * n
DIRECT_FACTOR = 32


@njit(cache=True)
def profile(indptr, indices, w, order):
    n = order.shape[0]
    pos = np.empty(n, np.int64)
    for k in range(n):
        pos[order[k]] = k
    b = np.zeros(n + 1, np.int64)
    for k in range(n):
        v = order[k]
        delta = 0
        for e in range(indptr[v], indptr[v + 1]):
            if pos[indices[e]] < k:
                delta -= w[e]
            else:
                delta += w[e]
        b[k + 1] = b[k] + delta
    b[n] = 0
    return b


@njit(cache=True)
def relocate(order, p, q):
    v = order[p]
    if q > p:
        for k in range(p, q):
            order[k] = order[k + 1]
    else:
        for k in range(p, q, -1):
            order[k] = order[k - 1]
    order[q] = v


@njit(cache=True, inline="always")
def _bump(tab, touched, top, nt, r, delta):
    # tab[:BLOCK_OFS] holds counts; tab[BLOCK_OFS + (r >> 5)] counts the
    # nonzero entries of each 32-entry block, so scans skip empty blocks.
    old = tab[r]
    tab[r] = old + delta
    if old == 0:
        touched[nt] = r
        nt += 1
        tab[touched[-1] + (r >> 5)] += 1
        if r > top:
            top = r
    elif old + delta == 0:
        tab[touched[-1] + (r >> 5)] -= 1
        if r == top:
            ofs = touched[-1]
            while top >= 0 and tab[top] == 0:
                if top & 31 == 0:
                    blk = (top >> 5) - 1
                    while blk >= 0 and tab[ofs + blk] == 0:
                        blk -= 1
                    top = (blk << 5) + 32 if blk >= 0 else 0
                top -= 1
    return top, nt


@njit(cache=True, inline="always")
def _clear(tab, touched, nt):
    ofs = touched[-1]
    for i in range(nt):
        r = touched[i]
        tab[r] = 0
        tab[ofs + (r >> 5)] = 0


@njit(cache=True, inline="always")
def _key(direct, uniq, x):
    if direct:
        return x
    return np.searchsorted(uniq, x)


@njit(cache=True)
def _vertex_values(indptr, indices, w, pos, b, v, p, tmp, c, newv):
    """Fill ``newv[k]``: profile entry ``k`` once ``v`` (at ``p``) moves past it."""
    n = pos.shape[0]
    for k in range(n):
        tmp[k] = 0
    for e in range(indptr[v], indptr[v + 1]):
        tmp[pos[indices[e]]] += w[e]
    c[0] = 0
    for k in range(n):
        c[k + 1] = c[k] + tmp[k]
    deg = c[n]
    for k in range(1, p + 1):
        newv[k] = b[k - 1] + deg - 2 * c[k - 1]
    for k in range(p + 1, n):
        newv[k] = b[k + 1] + 2 * c[k + 1] - deg


@njit(cache=True)
def _running_max(b, n, pmax, smax):
    """``pmax[k] = max(b[1..k])`` and ``smax[k] = max(b[k..n-1])``."""
    pmax[0] = 0
    for k in range(1, n):
        pmax[k] = max(pmax[k - 1], b[k])
    smax[n] = 0
    for k in range(n - 1, 0, -1):
        smax[k] = max(smax[k + 1], b[k])


@njit(cache=True)
def _ranks(direct, b, newv, n, vals):
    if direct:
        return vals[:0]
    m = 0
    for k in range(1, n):
        vals[m] = b[k]
        vals[m + 1] = newv[k]
        m += 2
    return np.unique(vals[:m])


@njit(cache=True)
def _compare_moves(direct, b, lo1, hi1, new1, lo2, hi2, new2, tab, touched):
    """Sign of width(move 1) - width(move 2).

    Move ``i`` replaces ``b[lo_i..hi_i]`` with ``new_i[lo_i..hi_i]``.
    """
    if direct:
        top, nt = -1, 0
        for k in range(lo1, hi1 + 1):
            top, nt = _bump(tab, touched, top, nt, new1[k], 1)
            top, nt = _bump(tab, touched, top, nt, b[k], -1)
        for k in range(lo2, hi2 + 1):
            top, nt = _bump(tab, touched, top, nt, new2[k], -1)
            top, nt = _bump(tab, touched, top, nt, b[k], 1)
        sign = 0
        if top >= 0:
            sign = 1 if tab[top] > 0 else -1
        _clear(tab, touched, nt)
        return sign
    n1 = hi1 - lo1 + 1
    n2 = hi2 - lo2 + 1
    x = np.empty(n1 + n2, np.int64)
    y = np.empty(n1 + n2, np.int64)
    for i in range(n1):
        x[i] = new1[lo1 + i]
        y[n2 + i] = b[lo1 + i]
    for i in range(n2):
        x[n1 + i] = b[lo2 + i]
        y[i] = new2[lo2 + i]
    x.sort()
    y.sort()
    for i in range(n1 + n2 - 1, -1, -1):
        if x[i] < y[i]:
            return -1
        if x[i] > y[i]:
            return 1
    return 0


@njit(cache=True)
def _signature(direct, uniq, b, lo, hi, newv, tab, touched):
    """Largest value whose count a move changes, and the count change.

    A move with a larger signature value (or the same value and a larger
    decrease) gives the smaller width; equal signatures need a full compare.
    """
    top, nt = -1, 0
    for k in range(lo, hi + 1):
        top, nt = _bump(tab, touched, top, nt, _key(direct, uniq, newv[k]), 1)
        top, nt = _bump(tab, touched, top, nt, _key(direct, uniq, b[k]), -1)
    d = tab[top]
    _clear(tab, touched, nt)
    value = top if direct else uniq[top]
    return value, d


@njit(cache=True, inline="always")
def _sig_order(v1, d1, v2, d2):
    """-1 if signature 1 is the better move, 1 if worse, 0 if undecided."""
    if v1 != v2:
        return -1 if v1 > v2 else 1
    if d1 != d2:
        return -1 if d1 < d2 else 1
    return 0


@njit(cache=True)
def workspace(w, n):
    """``(direct, tab, touched)`` for scans of an ``n``-vertex graph."""
    total = 0
    for x in w:
        total += x
    total //= 2
    direct = total <= DIRECT_FACTOR * max(n, 1)
    size = total + 1 if direct else 2 * n + 2
    tab = np.zeros(size + size // 32 + 1, np.int64)
    # last slot of ``touched`` stores the offset of the block counts in ``tab``
    touched = np.empty(4 * n + 9, np.int64)
    touched[-1] = size
    return direct, tab, touched


@njit(cache=True)
def first_improvement(indptr, indices, w, order, b, direct, tab, touched):
    """First width-reducing single-vertex relocation, or ``(-1, -1)``.

    Vertices are scanned by position, targets by ascending position.
    """
    n = order.shape[0]
    pos = np.empty(n, np.int64)
    for k in range(n):
        pos[order[k]] = k
    tmp = np.zeros(n, np.int64)
    c = np.zeros(n + 1, np.int64)
    newv = np.zeros(n + 1, np.int64)
    vals = np.empty(2 * n, np.int64)
    pmax = np.empty(n + 1, np.int64)
    smax = np.empty(n + 1, np.int64)
    _running_max(b, n, pmax, smax)
    for p in range(n):
        _vertex_values(indptr, indices, w, pos, b, order[p], p, tmp, c, newv)
        uniq = _ranks(direct, b, newv, n, vals)
        best = -1
        top, nt = -1, 0
        for q in range(p - 1, -1, -1):
            # a rewritten value above every replaceable one can never win
            if newv[q + 1] > pmax[p]:
                break
            top, nt = _bump(tab, touched, top, nt, _key(direct, uniq, newv[q + 1]), 1)
            top, nt = _bump(tab, touched, top, nt, _key(direct, uniq, b[q + 1]), -1)
            if top >= 0 and tab[top] < 0:
                best = q
        _clear(tab, touched, nt)
        if best >= 0:
            return p, best
        top, nt = -1, 0
        for q in range(p + 1, n):
            if newv[q] > smax[p + 1]:
                break
            top, nt = _bump(tab, touched, top, nt, _key(direct, uniq, newv[q]), 1)
            top, nt = _bump(tab, touched, top, nt, _key(direct, uniq, b[q]), -1)
            if top >= 0 and tab[top] < 0:
                _clear(tab, touched, nt)
                return p, q
        _clear(tab, touched, nt)
    return -1, -1


@njit(cache=True)
def steepest_move(indptr, indices, w, order, b, direct, tab, touched):
    """Relocation giving the lexicographically smallest width.

    Returns ``(-1, -1)`` when no relocation lowers the width. Ties go to the
    earlier vertex position, then to the smaller target position.
    """
    n = order.shape[0]
    pos = np.empty(n, np.int64)
    for k in range(n):
        pos[order[k]] = k
    tmp = np.zeros(n, np.int64)
    c = np.zeros(n + 1, np.int64)
    newv = np.zeros(n + 1, np.int64)
    best_new = np.zeros(n + 1, np.int64)
    vals = np.empty(2 * n, np.int64)
    pmax = np.empty(n + 1, np.int64)
    smax = np.empty(n + 1, np.int64)
    _running_max(b, n, pmax, smax)
    gp, gq, glo, ghi, gv, gd = -1, -1, 0, -1, 0, 0
    for p in range(n):
        _vertex_values(indptr, indices, w, pos, b, order[p], p, tmp, c, newv)
        uniq = _ranks(direct, b, newv, n, vals)

        # Ranges nest, so the table only holds the difference between the
        # current candidate and the best one so far; cleared on each update.
        lq = -1
        top, nt = -1, 0
        for q in range(p - 1, -1, -1):
            if newv[q + 1] > pmax[p]:
                break
            top, nt = _bump(tab, touched, top, nt, _key(direct, uniq, newv[q + 1]), 1)
            top, nt = _bump(tab, touched, top, nt, _key(direct, uniq, b[q + 1]), -1)
            if (top >= 0 and tab[top] < 0) or (lq >= 0 and top < 0):
                lq = q
                _clear(tab, touched, nt)
                top, nt = -1, 0
        _clear(tab, touched, nt)
        rq = -1
        top, nt = -1, 0
        for q in range(p + 1, n):
            if newv[q] > smax[p + 1]:
                break
            top, nt = _bump(tab, touched, top, nt, _key(direct, uniq, newv[q]), 1)
            top, nt = _bump(tab, touched, top, nt, _key(direct, uniq, b[q]), -1)
            if top >= 0 and tab[top] < 0:
                rq = q
                _clear(tab, touched, nt)
                top, nt = -1, 0
        _clear(tab, touched, nt)

        bq, blo, bhi, bv, bd = -1, 0, -1, 0, 0
        if lq >= 0:
            bq, blo, bhi = lq, lq + 1, p
            bv, bd = _signature(direct, uniq, b, blo, bhi, newv, tab, touched)
        if rq >= 0:
            rv, rd = _signature(direct, uniq, b, p + 1, rq, newv, tab, touched)
            better = bq < 0
            if not better:
                o = _sig_order(rv, rd, bv, bd)
                if o == 0:
                    o = _compare_moves(direct, b, p + 1, rq, newv, blo, bhi, newv, tab, touched)
                better = o < 0
            if better:
                bq, blo, bhi, bv, bd = rq, p + 1, rq, rv, rd
        if bq < 0:
            continue
        better = gp < 0
        if not better:
            o = _sig_order(bv, bd, gv, gd)
            if o == 0:
                o = _compare_moves(direct, b, blo, bhi, newv, glo, ghi, best_new, tab, touched)
            better = o < 0
        if better:
            gp, gq, glo, ghi, gv, gd = p, bq, blo, bhi, bv, bd
            for k in range(blo, bhi + 1):
                best_new[k] = newv[k]
    return gp, gq


@njit(cache=True)
def descend(indptr, indices, w, order, max_moves, steepest, maxblock):
    """Apply improving relocations to ``order`` in place until none is left.

    Single-vertex moves are exhausted first; a run relocation of up to
    ``maxblock`` vertices is tried only at a single-vertex fixed point.
    Returns the number of accepted moves, or ``-1`` if ``max_moves`` ran out.
    """
    moves = 0
    direct, tab, touched = workspace(w, order.shape[0])
    b = profile(indptr, indices, w, order)
    while True:
        if steepest:
            p, q = steepest_move(indptr, indices, w, order, b, direct, tab, touched)
        else:
            p, q = first_improvement(indptr, indices, w, order, b, direct, tab, touched)
        blk = False
        if p < 0 and maxblock >= 2:
            i, length, flip, t = block_improvement(indptr, indices, w, order, b, maxblock)
            if i < 0:
                return moves
            blk = True
        elif p < 0:
            return moves
        if max_moves >= 0 and moves >= max_moves:
            return -1
        if blk:
            move_block(order, i, length, flip, t)
        else:
            relocate(order, p, q)
        b = profile(indptr, indices, w, order)
        moves += 1


@njit(cache=True)
def _less_on_range(b, lo, hi, newv):
    """True if replacing ``b[lo..hi]`` with ``newv[lo..hi]`` lowers the width."""
    m = hi - lo + 1
    x = np.empty(m, np.int64)
    y = np.empty(m, np.int64)
    for i in range(m):
        x[i] = newv[lo + i]
        y[i] = b[lo + i]
    x.sort()
    y.sort()
    for i in range(m - 1, -1, -1):
        if x[i] != y[i]:
            return x[i] < y[i]
    return False


@njit(cache=True)
def block_improvement(indptr, indices, w, order, b, maxlen):
    """First width-reducing relocation of a run of 2..``maxlen`` vertices.

    The run may keep or reverse its internal order. Returns
    ``(start, length, reversed, target)`` where ``target`` is the run's first
    position after the move, or ``(-1, 0, False, -1)``.
    """
    n = order.shape[0]
    pos = np.empty(n, np.int64)
    for k in range(n):
        pos[order[k]] = k
    pmax = np.empty(n + 1, np.int64)
    smax = np.empty(n + 1, np.int64)
    _running_max(b, n, pmax, smax)
    blk = np.empty(maxlen, np.int64)
    # cw[s, t] = weight between the first s run vertices and the first t
    # vertices of the order with the run removed
    cw = np.zeros((maxlen + 1, n + 1), np.int64)
    tmp = np.zeros(n, np.int64)
    inner = np.zeros(maxlen + 1, np.int64)
    b0 = np.zeros(n + 1, np.int64)
    b1 = np.zeros(n + 1, np.int64)
    newv = np.zeros(n + 1, np.int64)
    for i in range(n):
        for length in range(2, maxlen + 1):
            if i + length > n:
                break
            m = n - length
            for flip in range(2):
                for s in range(length):
                    blk[s] = order[i + length - 1 - s] if flip else order[i + s]
                # rest-position of an outside vertex at order position k
                inner[0] = 0
                for s in range(length):
                    v = blk[s]
                    for k in range(n):
                        tmp[k] = 0
                    inside = 0
                    deg = 0
                    for e in range(indptr[v], indptr[v + 1]):
                        u = indices[e]
                        pu = pos[u]
                        deg += w[e]
                        if i <= pu < i + length:
                            # earlier run member under the chosen orientation
                            su = pu - i if not flip else i + length - 1 - pu
                            if su < s:
                                inside += w[e]
                        else:
                            tmp[pu - length if pu >= i + length else pu] += w[e]
                    inner[s + 1] = inner[s] + deg - 2 * inside
                    cw[s + 1, 0] = cw[s, 0]
                    acc = 0
                    for t in range(m):
                        acc += tmp[t]
                        cw[s + 1, t + 1] = cw[s, t + 1] + acc
                bb = inner[length]
                # b0[t]: boundary of the first t rest vertices; b1[t]: plus run
                for t in range(m + 1):
                    if t <= i:
                        b0[t] = b[t]
                    else:
                        b0[t] = b[t + length] - bb + 2 * cw[length, t]
                    b1[t] = b0[t] + bb - 2 * cw[length, t]
                # left targets, scanned from the nearest outwards
                best = -1
                tail = 0
                for q in range(i - 1, -1, -1):
                    tail = max(tail, b1[q])
                    if tail > pmax[i + length - 1]:
                        break
                    for s in range(1, length):
                        newv[q + s] = b0[q] + inner[s] - 2 * cw[s, q]
                    for k in range(q + length, i + length):
                        newv[k] = b1[k - length]
                    if _less_on_range(b, q + 1, i + length - 1, newv):
                        best = q
                if best >= 0:
                    return i, length, flip == 1, best
                head = 0
                for q in range(i + 1, m + 1):
                    head = max(head, b0[q])
                    if head > smax[i + 1]:
                        break
                    for k in range(i + 1, q + 1):
                        newv[k] = b0[k]
                    for s in range(1, length):
                        newv[q + s] = b0[q] + inner[s] - 2 * cw[s, q]
                    if _less_on_range(b, i + 1, q + length - 1, newv):
                        return i, length, flip == 1, q
    return -1, 0, False, -1


@njit(cache=True)
def move_block(order, i, length, flip, q):
    """Relocate ``order[i:i+length]`` (optionally reversed) to start at ``q``."""
    n = order.shape[0]
    blk = order[i:i + length].copy()
    if flip:
        blk = blk[::-1].copy()
    rest = np.empty(n - length, np.int64)
    rest[:i] = order[:i]
    rest[i:] = order[i + length:]
    order[:q] = rest[:q]
    order[q:q + length] = blk
    order[q + length:] = rest[q:]
