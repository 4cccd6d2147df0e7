"""Compiled inner loops for graph construction and PGCS.

Vertices are the big-endian integer ids used throughout the graph layer.
LCS is invariant under reversing both arguments, so the kernels can treat
an id directly as a packed word with symbol order reversed.
"""

from __future__ import annotations

import numba as nb
import numpy as np

# TBB in some images is too old for numba and only emits a warning.
nb.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

_ONE = np.uint64(1)


@nb.njit(cache=True, inline="always")
def popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@nb.njit(cache=True)
def lcs_packed(a, b, n):
    """Bit-parallel LCS of two length-n words (Hyyro's row update)."""
    mask = (_ONE << np.uint64(n)) - _ONE
    m1 = np.uint64(a) & mask
    m0 = ~m1 & mask
    v = mask
    for j in range(n):
        if (b >> j) & 1:
            u = v & m1
        else:
            u = v & m0
        v = ((v + u) | (v - u)) & mask
    return n - popcount64(v)


@nb.njit(cache=True)
def build_rows_sequential(n, limit, rows):
    nv = 1 << n
    for u in range(nv):
        for v in range(u + 1, nv):
            if lcs_packed(u, v, n) <= limit:
                rows[u, v >> 6] |= _ONE << np.uint64(v & 63)
                rows[v, u >> 6] |= _ONE << np.uint64(u & 63)


@nb.njit(cache=True, parallel=True)
def build_rows_parallel(n, limit, rows):
    # each u owns row u exclusively, so no write races
    nv = 1 << n
    for u in nb.prange(nv):
        for v in range(nv):
            if v != u and lcs_packed(u, v, n) <= limit:
                rows[u, v >> 6] |= _ONE << np.uint64(v & 63)


@nb.njit(cache=True, inline="always")
def _lazy(val, stamp, v, it, dec):
    return val[v] * dec ** np.float64(it - stamp[v])


@nb.njit(cache=True, nogil=True)
def pgcs_steps(rows, inc, dec, rng, val, stamp, members, cand, best, trace, meta,
               start, stop, target):
    """Run PGCS iterations ``start+1 .. stop`` in place.

    ``meta`` holds [clique size, best size, trace length]. Returns the last
    iteration executed (stops early once ``target`` is reached).
    """
    nv = rows.shape[0]
    nw = rows.shape[1]
    k = meta[0]
    bk = meta[1]
    tl = meta[2]
    it = start
    while it < stop:
        it += 1
        prev = it - 1
        # argmin penalty over candidates, uniform among ties
        pick = -1
        low_p = np.inf
        ties = 0
        for w in range(nw):
            x = cand[w]
            while x:
                lsb = x & (~x + _ONE)
                v = w * 64 + popcount64(lsb - _ONE)
                x ^= lsb
                p = _lazy(val, stamp, v, prev, dec)
                if p < low_p:
                    low_p = p
                    pick = v
                    ties = 1
                elif p == low_p:
                    ties += 1
                    if rng.integers(0, ties) == 0:
                        pick = v
        if pick >= 0:
            members[k] = pick
            k += 1
            for w in range(nw):
                cand[w] &= rows[pick, w]
        elif k > 1:
            at = -1
            high_p = -1.0
            ties = 0
            for i in range(k):
                p = _lazy(val, stamp, members[i], prev, dec)
                if p > high_p:
                    high_p = p
                    at = i
                    ties = 1
                elif p == high_p:
                    ties += 1
                    if rng.integers(0, ties) == 0:
                        at = i
            members[at] = members[k - 1]
            k -= 1
            for w in range(nw):
                cand[w] = rows[members[0], w]
            for i in range(1, k):
                for w in range(nw):
                    cand[w] &= rows[members[i], w]
        else:
            v = rng.integers(0, nv)
            members[0] = v
            for w in range(nw):
                cand[w] = rows[v, w]
        for i in range(k):
            v = members[i]
            val[v] = (_lazy(val, stamp, v, prev, dec) + inc) * dec
            stamp[v] = it
        if k > bk:
            bk = k
            for i in range(k):
                best[i] = members[i]
            trace[tl, 0] = it
            trace[tl, 1] = k
            tl += 1
            if bk >= target:
                break
    meta[0] = k
    meta[1] = bk
    meta[2] = tl
    return it
