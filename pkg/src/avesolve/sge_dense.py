"""Signed Gaussian elimination for dense coefficient matrices.

Each step pivots the remaining entry of largest ``|c|`` to the front
(symmetric row/column swap), takes its sign as the sign of the corresponding
solution entry and eliminates on ``I - S*Sigma``.  The working array holds
``S`` itself: after fixing ``sigma`` for the pivot, the trailing block is
replaced by the Schur-type update ``H + sigma * G F / (1 - sigma*s_11)``, so
the signs of the not yet eliminated variables never need to be known.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    PIVOT_REL_EPS,
    AveInstance,
    StructureClass,
    ZeroPivot,
    classify,
    dense_of,
    inf_norm,
    is_strict_diag_dominant,
    is_symmetric,
    is_tridiagonal,
    residual,
)

TOL_SOLVE = 1e-9


@dataclass
class SgeSolution:
    z: np.ndarray
    signature: np.ndarray
    permutation: np.ndarray  # permutation[j] = original index eliminated at step j
    residual_inf: float
    comparisons: int
    flops: int
    structure: StructureClass
    norm_warning: bool
    method: str = "dense"
    queue_ops: int = 0
    pivots: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def n(self) -> int:
        return self.z.size


@dataclass
class EliminationState:
    """Working arrays of a dense elimination.

    ``s`` starts as a copy of S and is permuted physically.  Rows ``< step``
    hold the eliminated rows of S (the upper factor, up to the signs), the
    block ``s[step:, step:]`` is the current reduced matrix.
    """

    s: np.ndarray
    c: np.ndarray
    perm: np.ndarray
    signs: np.ndarray
    pivots: np.ndarray
    step: int = 0
    flops: int = 0
    comparisons: int = 0
    pivot_eps: float = 0.0

    @classmethod
    def start(cls, s, c) -> "EliminationState":
        s = np.array(s, dtype=float)
        n = s.shape[0]
        return cls(
            s=s,
            c=np.array(c, dtype=float),
            perm=np.arange(n),
            signs=np.ones(n, dtype=np.int8),
            pivots=np.zeros(n),
            pivot_eps=PIVOT_REL_EPS * (1.0 + inf_norm(s)),
        )

    @property
    def n(self) -> int:
        return self.c.size

    def reduced_matrix(self) -> np.ndarray:
        return self.s[self.step :, self.step :]

    def reduced_rhs(self) -> np.ndarray:
        return self.c[self.step :]

    def swap(self, k: int) -> None:
        """Symmetric swap of the current step position with position ``k``."""
        j = self.step
        if k == j:
            return
        s = self.s
        s[[j, k]] = s[[k, j]]
        s[:, [j, k]] = s[:, [k, j]]
        self.c[[j, k]] = self.c[[k, j]]
        self.perm[[j, k]] = self.perm[[k, j]]


def select_pivot(c, start: int = 0, labels=None) -> int:
    """Position of the largest ``|c[k]|`` for ``k >= start``.

    Ties go to the smallest position, or to the smallest ``labels[k]`` when
    labels are given (the solvers pass original indices).
    """
    a = np.abs(np.asarray(c, dtype=float)[start:])
    cand = np.flatnonzero(a == a.max())
    if labels is None or cand.size == 1:
        return start + int(cand[0])
    lab = np.asarray(labels)[start + cand]
    return start + int(cand[np.argmin(lab)])


def choose_sign(ck: float) -> int:
    return -1 if ck < 0 else 1


def gauss_step(state: EliminationState, sigma: int) -> EliminationState:
    """Eliminate the variable at ``state.step`` assuming its sign is ``sigma``.

    Updates ``state`` in place and returns it.
    """
    j = state.step
    s, c = state.s, state.c
    p = 1.0 - sigma * s[j, j]
    if abs(p) < state.pivot_eps:
        raise ZeroPivot(f"pivot 1 - sigma*s_kk = {p!r} at step {j}")
    m = state.n - j - 1
    if m:
        f = (sigma * s[j + 1 :, j]) / p
        s[j + 1 :, j + 1 :] += np.outer(f, s[j, j + 1 :])
        c[j + 1 :] += f * c[j]
    state.signs[j] = sigma
    state.pivots[j] = p
    state.step = j + 1
    state.flops += m * m + 2 * m + 1
    return state


def back_substitute(state: EliminationState) -> np.ndarray:
    """Solve the triangularized system; result is in working (permuted) order."""
    n = state.n
    s, c, p = state.s, state.c, state.pivots
    sz = np.zeros(n)  # sigma_l * z_l for already solved l
    zw = np.zeros(n)
    for j in range(n - 1, -1, -1):
        acc = c[j] + s[j, j + 1 :] @ sz[j + 1 :] if j + 1 < n else c[j]
        zw[j] = acc / p[j]
        sz[j] = state.signs[j] * zw[j]
    state.flops += n * (n - 1) // 2 + n
    return zw


Observer = Callable[[EliminationState], None]


def sge_solve(inst: AveInstance, observer: Optional[Observer] = None) -> SgeSolution:
    """Solve ``z - S|z| = c`` by signed Gaussian elimination.

    Exact for every matrix in one of the four structure classes.  Matrices
    with ``||S||_inf >= 1`` are processed anyway and flagged through
    ``norm_warning``.  ``observer`` is called after every elimination step.
    """
    S = inst.dense()
    state = EliminationState.start(S, inst.rhs)
    n = state.n
    for _ in range(n):
        j = state.step
        k = select_pivot(state.c, j, labels=state.perm)
        state.comparisons += n - j - 1
        state.swap(k)
        gauss_step(state, choose_sign(state.c[j]))
        if observer is not None:
            observer(state)
    zw = back_substitute(state)
    return _finish(inst, S, state.perm, state.signs, zw, state.pivots,
                   state.comparisons, state.flops, "dense")


def _finish(inst, S, order, signs, zw, pivots, comparisons, flops, method, queue_ops=0):
    n = zw.size
    z = np.empty(n)
    z[order] = zw
    sig = np.empty(n, dtype=np.int8)
    sig[order] = signs
    m = inst.matrix
    norm = inf_norm(m)
    return SgeSolution(
        z=z,
        signature=sig,
        permutation=np.asarray(order, dtype=np.int64),
        residual_inf=float(np.abs(residual(m, z, inst.rhs)).max()),
        comparisons=int(comparisons),
        flops=int(flops),
        structure=classify(m),
        norm_warning=norm >= 1.0,
        method=method,
        queue_ops=int(queue_ops),
        pivots=np.asarray(pivots, dtype=float),
    )


class SchurMonitor:
    """Observer that checks each reduced matrix against its parent.

    Records a violation whenever the reduced matrix has a larger inf-norm
    than its predecessor (beyond ``rtol``), or loses strict diagonal
    dominance, symmetry or tridiagonality that the input had.  Tridiagonality
    is judged with the remaining variables in their original order.
    """

    def __init__(self, S, rtol: float = 1e-12):
        S = dense_of(S)
        self.rtol = rtol
        self.props = {
            "diag_dominant": is_strict_diag_dominant(S),
            "symmetric": is_symmetric(S),
            "tridiagonal": is_tridiagonal(S),
        }
        self.last_norm = inf_norm(S)
        self.steps = 0
        self.min_pivot_margin = np.inf
        self.violations: list[str] = []

    def check(self, reduced: np.ndarray, labels: np.ndarray, step: int,
              pivot: Optional[float] = None) -> None:
        """Compare one reduced matrix with its parent (the previous one)."""
        self.steps += 1
        if pivot is not None:
            floor = 1.0 - self.last_norm
            self.min_pivot_margin = min(self.min_pivot_margin, pivot - floor)
            if pivot < floor - self.rtol * (1.0 + abs(floor)):
                self.violations.append(f"step {step}: pivot {pivot} below {floor}")
        if reduced.shape[0] == 0:
            return
        norm = inf_norm(reduced)
        if norm > self.last_norm * (1.0 + self.rtol) + self.rtol:
            self.violations.append(f"step {step}: norm grew {self.last_norm} -> {norm}")
        self.last_norm = norm
        order = np.argsort(labels, kind="stable")
        r = reduced[np.ix_(order, order)]
        if self.props["diag_dominant"] and not is_strict_diag_dominant(r):
            self.violations.append(f"step {step}: lost diagonal dominance")
        if self.props["symmetric"] and not np.allclose(
            r, r.T, rtol=self.rtol, atol=self.rtol * (1.0 + norm)
        ):
            self.violations.append(f"step {step}: lost symmetry")
        if self.props["tridiagonal"] and not is_tridiagonal(r):
            self.violations.append(f"step {step}: lost tridiagonality")

    def __call__(self, state: EliminationState) -> None:
        j = state.step - 1
        self.check(state.reduced_matrix().copy(), state.perm[state.step :], j,
                   pivot=state.pivots[j])

    @property
    def ok(self) -> bool:
        return not self.violations
