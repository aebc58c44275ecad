"""Signed Gaussian elimination for tridiagonal S in near-linear time.

Variables live on a doubly linked chain.  Eliminating a node couples its two
alive neighbours, so the reduced system stays tridiagonal along the chain.
The next pivot (largest ``|c|``, smallest index on ties) comes from a binary
heap with lazy invalidation: a node whose ``c`` changed is pushed again and
stale entries are skipped when popped.
"""

from __future__ import annotations

import heapq
from typing import Callable, Optional

import numpy as np

from .core import PIVOT_REL_EPS, AveInstance, BadParameter, TriDiagMatrix, ZeroPivot
from .sge_dense import SgeSolution, _finish

NONE = -1


class ChainSystem:
    """Tridiagonal AVE as a linked chain of alive nodes.

    Per node ``k``: ``d[k]`` is the current diagonal entry of S, ``lc[k]`` the
    coupling ``S[k, left[k]]`` and ``rc[k]`` the coupling ``S[k, right[k]]``.
    """

    def __init__(self, m: TriDiagMatrix, c):
        n = m.n
        self.n = n
        self.d = m.diag.tolist()
        self.lc = [0.0] + m.sub.tolist()
        self.rc = m.sup.tolist() + [0.0]
        self.c = np.asarray(c, dtype=float).tolist()
        self.left = list(range(-1, n - 1))
        self.right = list(range(1, n)) + [NONE]
        self.alive = [True] * n
        # Elimination records, indexed by node.
        self.sign = [1] * n
        self.pivot = [0.0] * n
        self.order: list[int] = []
        self.pivot_eps = PIVOT_REL_EPS * (1.0 + float(m.row_abs_sums().max()))
        self.heap = [(-abs(v), k) for k, v in enumerate(self.c)]
        heapq.heapify(self.heap)
        self.queue_ops = n
        self.arith_ops = 0

    def alive_nodes(self) -> list[int]:
        return [k for k in range(self.n) if self.alive[k]]

    def reduced_matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense reduced matrix over the alive nodes (in original order)."""
        nodes = self.alive_nodes()
        pos = {k: i for i, k in enumerate(nodes)}
        r = np.zeros((len(nodes), len(nodes)))
        for k in nodes:
            i = pos[k]
            r[i, i] = self.d[k]
            if self.left[k] != NONE:
                r[i, pos[self.left[k]]] = self.lc[k]
            if self.right[k] != NONE:
                r[i, pos[self.right[k]]] = self.rc[k]
        return r, np.array(nodes, dtype=np.int64)

    def pop_max(self) -> int:
        """Remove and return the alive node with the largest ``|c|``."""
        heap, alive, c = self.heap, self.alive, self.c
        while True:
            self.queue_ops += len(heap).bit_length()
            key, k = heapq.heappop(heap)
            if alive[k] and key == -abs(c[k]):
                return k

    def eliminate_node(self, k: int, sigma: int) -> None:
        d, lc, rc, c = self.d, self.lc, self.rc, self.c
        p = 1.0 - sigma * d[k]
        if abs(p) < self.pivot_eps:
            raise ZeroPivot(f"pivot 1 - sigma*s_kk = {p!r} at node {k}")
        a = self.left[k]
        b = self.right[k]
        ck = c[k]
        ska = lc[k]
        skb = rc[k]
        heap = self.heap
        ops = 1
        if a != NONE:
            fa = (sigma * rc[a]) / p
            d[a] += fa * ska
            c[a] += fa * ck
            rc[a] = fa * skb if b != NONE else 0.0
            self.right[a] = b
            heapq.heappush(heap, (-abs(c[a]), a))
            self.queue_ops += len(heap).bit_length()
            ops += 4
        if b != NONE:
            fb = (sigma * lc[b]) / p
            d[b] += fb * skb
            c[b] += fb * ck
            lc[b] = fb * ska if a != NONE else 0.0
            self.left[b] = a
            heapq.heappush(heap, (-abs(c[b]), b))
            self.queue_ops += len(heap).bit_length()
            ops += 4
        self.arith_ops += ops
        self.alive[k] = False
        self.sign[k] = sigma
        self.pivot[k] = p
        self.order.append(k)

    def back_substitute(self) -> np.ndarray:
        """Solve for z in original order, walking the eliminations in reverse.

        When node ``k`` was eliminated its ``left``/``right`` links still point
        at the neighbours it was coupled to, which are eliminated later.
        """
        z = [0.0] * self.n
        sz = [0.0] * self.n  # sigma * z
        lc, rc, c, left, right = self.lc, self.rc, self.c, self.left, self.right
        sign, pivot = self.sign, self.pivot
        for k in reversed(self.order):
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
        self.arith_ops += 3 * self.n
        return np.array(z)

    def run(self, observer: Optional[Callable[["ChainSystem"], None]] = None) -> None:
        """Eliminate every node in max-|c| order."""
        for _ in range(self.n):
            k = self.pop_max()
            self.eliminate_node(k, -1 if self.c[k] < 0 else 1)
            if observer is not None:
                observer(self)


def tridiag_sge_solve(inst: AveInstance, observer=None, reference: bool = False
                      ) -> SgeSolution:
    """Signed Gaussian elimination on a tridiagonal AVE.

    ``flops`` counts the non-queue arithmetic, which is O(n).  ``queue_ops``
    counts heap comparisons.  The compiled kernel is used unless an
    ``observer`` is given or ``reference`` is set; the pure-Python
    :class:`ChainSystem` path bounds queue work by heap depth instead.
    """
    m = inst.matrix
    if not isinstance(m, TriDiagMatrix):
        m = TriDiagMatrix.from_dense(m)
        inst = AveInstance(m, inst.rhs)
    if observer is None and not reference:
        from ._chain_kernel import chain_solve

        eps = PIVOT_REL_EPS * (1.0 + float(m.row_abs_sums().max()))
        z, order, sign, pivot, ops, qops, bad = chain_solve(
            m.diag, m.sub, m.sup, np.asarray(inst.rhs, dtype=float), eps
        )
        if bad >= 0:
            raise ZeroPivot(f"pivot 1 - sigma*s_kk vanished at node {bad}")
    else:
        chain = ChainSystem(m, inst.rhs)
        chain.run(observer)
        z = chain.back_substitute()
        order = np.asarray(chain.order, dtype=np.int64)
        sign = np.asarray(chain.sign, dtype=np.int8)
        pivot = np.asarray(chain.pivot)
        ops, qops = chain.arith_ops, chain.queue_ops
    return _finish(inst, None, order, sign[order], z[order], pivot[order], qops,
                   ops, "tridiag", queue_ops=qops)


def as_tridiag(inst: AveInstance) -> AveInstance:
    if isinstance(inst.matrix, TriDiagMatrix):
        return inst
    try:
        return AveInstance(TriDiagMatrix.from_dense(inst.matrix), inst.rhs)
    except BadParameter:
        raise BadParameter("instance matrix is not tridiagonal") from None


def chain_observer(monitor):
    """Adapt a :class:`SchurMonitor` to :meth:`ChainSystem.run`."""

    def observe(chain: ChainSystem) -> None:
        r, labels = chain.reduced_matrix()
        k = chain.order[-1]
        monitor.check(r, labels, len(chain.order) - 1, pivot=chain.pivot[k])

    return observe
