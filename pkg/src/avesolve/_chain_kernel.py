"""Compiled chain elimination for large tridiagonal systems.

Same arithmetic, in the same order, as :class:`ChainSystem`; the heap is an
array-backed binary max-heap keyed by ``(|c|, -index)`` with lazy
invalidation.  ``queue_ops`` counts key comparisons made by the heap.
"""

import numpy as np
from numba import njit

NONE = -1


@njit(cache=True, inline="always")
def _before(k1, i1, k2, i2):
    return k1 > k2 or (k1 == k2 and i1 < i2)


@njit(cache=True)
def _sift_down(hk, hi, size, pos):
    key = hk[pos]
    idx = hi[pos]
    comps = 0
    while True:
        child = 2 * pos + 1
        if child >= size:
            break
        right = child + 1
        if right < size:
            comps += 1
            if _before(hk[right], hi[right], hk[child], hi[child]):
                child = right
        comps += 1
        if _before(hk[child], hi[child], key, idx):
            hk[pos] = hk[child]
            hi[pos] = hi[child]
            pos = child
        else:
            break
    hk[pos] = key
    hi[pos] = idx
    return comps


@njit(cache=True)
def _push(hk, hi, size, key, idx):
    pos = size
    comps = 0
    while pos > 0:
        parent = (pos - 1) >> 1
        comps += 1
        if _before(key, idx, hk[parent], hi[parent]):
            hk[pos] = hk[parent]
            hi[pos] = hi[parent]
            pos = parent
        else:
            break
    hk[pos] = key
    hi[pos] = idx
    return comps


@njit(cache=True)
def chain_solve(diag, sub, sup, c0, eps):
    """Returns ``(z, order, sign, pivot, arith_ops, queue_ops, bad_node)``.

    ``bad_node`` is -1 on success, otherwise the node whose pivot vanished.
    """
    n = diag.size
    d = diag.copy()
    c = c0.copy()
    lc = np.zeros(n)
    rc = np.zeros(n)
    lc[1:] = sub
    rc[: n - 1] = sup
    left = np.arange(-1, n - 1)
    right = np.arange(1, n + 1)
    right[n - 1] = NONE
    alive = np.ones(n, dtype=np.bool_)
    sign = np.ones(n, dtype=np.int8)
    pivot = np.zeros(n)
    order = np.empty(n, dtype=np.int64)

    cap = 3 * n
    hk = np.empty(cap)
    hi = np.empty(cap, dtype=np.int64)
    for k in range(n):
        hk[k] = abs(c[k])
        hi[k] = k
    size = n
    qops = 0
    for pos in range(n // 2 - 1, -1, -1):
        qops += _sift_down(hk, hi, size, pos)

    ops = 0
    z = np.zeros(n)
    for step in range(n):
        while True:
            key = hk[0]
            k = hi[0]
            size -= 1
            if size > 0:
                hk[0] = hk[size]
                hi[0] = hi[size]
                qops += _sift_down(hk, hi, size, 0)
            if alive[k] and key == abs(c[k]):
                break
        ck = c[k]
        sigma = -1 if ck < 0 else 1
        p = 1.0 - sigma * d[k]
        if abs(p) < eps:
            return z, order, sign, pivot, ops, qops, k
        a = left[k]
        b = right[k]
        ska = lc[k]
        skb = rc[k]
        ops += 1
        if a != NONE:
            fa = (sigma * rc[a]) / p
            d[a] += fa * ska
            c[a] += fa * ck
            rc[a] = fa * skb if b != NONE else 0.0
            right[a] = b
            qops += _push(hk, hi, size, abs(c[a]), a)
            size += 1
            ops += 4
        if b != NONE:
            fb = (sigma * lc[b]) / p
            d[b] += fb * skb
            c[b] += fb * ck
            lc[b] = fb * ska if a != NONE else 0.0
            left[b] = a
            qops += _push(hk, hi, size, abs(c[b]), b)
            size += 1
            ops += 4
        alive[k] = False
        sign[k] = sigma
        pivot[k] = p
        order[step] = k

    sz = np.zeros(n)
    for step in range(n - 1, -1, -1):
        k = order[step]
        a = left[k]
        b = right[k]
        acc = 0.0
        if a != NONE:
            acc += lc[k] * sz[a]
        if b != NONE:
            acc += rc[k] * sz[b]
        zk = (c[k] + acc) / pivot[k]
        z[k] = zk
        sz[k] = sign[k] * zk
    ops += 3 * n
    return z, order, sign, pivot, ops, qops, -1
