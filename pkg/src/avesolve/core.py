"""Matrix storage, norms, structure predicates and linear-algebra plumbing.

A dense coefficient matrix is a plain ``(n, n)`` float64 ndarray.  Tridiagonal
matrices use :class:`TriDiagMatrix` (three bands).  Signatures are int8 arrays
of ``+1``/``-1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

import numpy as np

PIVOT_REL_EPS = 1e-12
TOL_LIN = 1e-10


class AveError(Exception):
    """Base class for all solver errors."""


class SingularMatrix(AveError):
    pass


class ZeroPivot(AveError):
    """A signed elimination pivot ``1 - sigma*s_kk`` vanished."""


class DimensionTooLarge(AveError):
    pass


class BadParameter(AveError, ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TriDiagMatrix:
    """Three-band storage: ``sub[i] = S[i+1, i]``, ``sup[i] = S[i, i+1]``."""

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def __post_init__(self):
        diag = np.array(self.diag, dtype=float).ravel()
        sub = np.array(self.sub, dtype=float).ravel()
        sup = np.array(self.sup, dtype=float).ravel()
        if diag.size < 1:
            raise BadParameter("tridiagonal matrix needs n >= 1")
        if sub.size != diag.size - 1 or sup.size != diag.size - 1:
            raise BadParameter(
                f"band lengths {sub.size}/{diag.size}/{sup.size} inconsistent"
            )
        for a in (sub, diag, sup):
            a.flags.writeable = False
        object.__setattr__(self, "sub", sub)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "sup", sup)

    @property
    def n(self) -> int:
        return self.diag.size

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    def to_dense(self) -> np.ndarray:
        n = self.n
        m = np.diag(self.diag)
        if n > 1:
            idx = np.arange(n - 1)
            m[idx + 1, idx] = self.sub
            m[idx, idx + 1] = self.sup
        return m

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = self.diag * x
        if self.n > 1:
            y[1:] += self.sub * x[:-1]
            y[:-1] += self.sup * x[1:]
        return y

    def row_abs_sums(self) -> np.ndarray:
        r = np.abs(self.diag).copy()
        if self.n > 1:
            r[1:] += np.abs(self.sub)
            r[:-1] += np.abs(self.sup)
        return r

    @classmethod
    def from_dense(cls, m: np.ndarray) -> "TriDiagMatrix":
        m = as_dense(m)
        if not is_tridiagonal(m):
            raise BadParameter("matrix has entries outside the three bands")
        return cls(np.diag(m, -1), np.diag(m), np.diag(m, 1))


Matrix = Union[np.ndarray, TriDiagMatrix]


@dataclass(frozen=True, eq=False)
class AveInstance:
    """The absolute value equation ``z - S|z| = rhs``."""

    matrix: Matrix
    rhs: np.ndarray

    def __post_init__(self):
        m = self.matrix
        if not isinstance(m, TriDiagMatrix):
            m = as_dense(m)
            m.flags.writeable = False
            object.__setattr__(self, "matrix", m)
        rhs = np.array(self.rhs, dtype=float).ravel()
        if rhs.size != m.shape[0]:
            raise BadParameter(
                f"rhs has length {rhs.size}, matrix dimension is {m.shape[0]}"
            )
        rhs.flags.writeable = False
        object.__setattr__(self, "rhs", rhs)

    @property
    def n(self) -> int:
        return self.rhs.size

    def dense(self) -> np.ndarray:
        return dense_of(self.matrix)


class StructureClass(enum.Enum):
    """Which unique-sign-guess condition a matrix satisfies (first match wins)."""

    NormBelowHalf = 1
    IrreducibleNormAtMostHalf = 2
    DiagDominantNormAtMostTwoThirds = 3
    TridiagonalNormBelowOne = 4
    Unclassified = 0


def as_dense(m) -> np.ndarray:
    if isinstance(m, TriDiagMatrix):
        return m.to_dense()
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise BadParameter(f"expected a non-empty square matrix, got shape {a.shape}")
    return a


def dense_of(m: Matrix) -> np.ndarray:
    """Dense view of ``m`` without copying ndarray inputs."""
    if isinstance(m, TriDiagMatrix):
        return m.to_dense()
    return np.asarray(m, dtype=float)


def make_signature(signs) -> np.ndarray:
    s = np.asarray(signs)
    if not np.all((s == 1) | (s == -1)):
        raise BadParameter("signature entries must be +1 or -1")
    return s.astype(np.int8)


def signature_string(sig) -> str:
    return "".join("+" if s > 0 else "-" for s in np.asarray(sig))


def parse_signature(text: str) -> np.ndarray:
    table = {"+": 1, "-": -1}
    try:
        return np.array([table[ch] for ch in text.strip()], dtype=np.int8)
    except KeyError as exc:
        raise BadParameter(f"bad signature character {exc.args[0]!r}") from None


def signature_from_mask(mask: int, n: int) -> np.ndarray:
    """Bit ``i`` of ``mask`` set means ``sigma_{i+1} = -1``; mask 0 is all plus."""
    bits = (mask >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.int8)


def all_signatures(n: int) -> np.ndarray:
    """All ``2**n`` signatures as rows, in bit-mask order."""
    masks = np.arange(2**n, dtype=np.int64)[:, None]
    bits = (masks >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.int8)


def strict_sign(x) -> np.ndarray:
    """Signum with values in {-1, 0, 1}."""
    return np.sign(np.asarray(x, dtype=float)).astype(np.int8)


def inf_norm(m: Matrix) -> float:
    if isinstance(m, TriDiagMatrix):
        return float(m.row_abs_sums().max())
    return float(np.abs(dense_of(m)).sum(axis=1).max())


def is_irreducible(m: Matrix) -> bool:
    """Strong connectivity of the nonzero pattern (edge i->j when m[i,j] != 0)."""
    if isinstance(m, TriDiagMatrix):
        return bool(np.all(m.sub != 0.0) and np.all(m.sup != 0.0))
    a = dense_of(m) != 0.0
    n = a.shape[0]
    if n == 1:
        return True
    return _reaches_all(a) and _reaches_all(a.T)


def _reaches_all(adj: np.ndarray) -> bool:
    seen = np.zeros(adj.shape[0], dtype=bool)
    seen[0] = True
    frontier = seen.copy()
    while frontier.any():
        nxt = adj[frontier].any(axis=0) & ~seen
        seen |= nxt
        frontier = nxt
    return bool(seen.all())


def is_strict_diag_dominant(m: Matrix) -> bool:
    if isinstance(m, TriDiagMatrix):
        d = np.abs(m.diag)
        off = m.row_abs_sums() - d
    else:
        a = np.abs(dense_of(m))
        d = np.diag(a)
        off = a.sum(axis=1) - d
    return bool(np.all(d > off))


def is_tridiagonal(m: Matrix) -> bool:
    if isinstance(m, TriDiagMatrix):
        return True
    a = dense_of(m)
    i, j = np.indices(a.shape)
    return bool(np.all(a[np.abs(i - j) > 1] == 0.0))


def is_symmetric(m: Matrix) -> bool:
    if isinstance(m, TriDiagMatrix):
        return bool(np.array_equal(m.sub, m.sup))
    a = dense_of(m)
    return bool(np.array_equal(a, a.T))


def classify(m: Matrix) -> StructureClass:
    norm = inf_norm(m)
    if norm < 0.5:
        return StructureClass.NormBelowHalf
    if norm <= 0.5 and is_irreducible(m):
        return StructureClass.IrreducibleNormAtMostHalf
    if norm <= 2.0 / 3.0 and is_strict_diag_dominant(m):
        return StructureClass.DiagDominantNormAtMostTwoThirds
    if norm < 1.0 and is_tridiagonal(m):
        return StructureClass.TridiagonalNormBelowOne
    return StructureClass.Unclassified


def residual(m: Matrix, z, c) -> np.ndarray:
    """``z - S|z| - c``."""
    z = np.asarray(z, dtype=float)
    c = np.asarray(c, dtype=float)
    if isinstance(m, TriDiagMatrix):
        return z - m.matvec(np.abs(z)) - c
    return z - dense_of(m) @ np.abs(z) - c


def orthant_check(z, sigma, atol: float = 0.0) -> bool:
    """True iff ``sigma_i * z_i >= -atol`` for all i (zero lies in every orthant)."""
    z = np.asarray(z, dtype=float)
    sigma = np.asarray(sigma)
    if z.shape != sigma.shape:
        raise BadParameter("z and signature lengths differ")
    return bool(np.all(sigma * z >= -atol))


def signs_coincide(z, c) -> np.ndarray:
    """Strict sign coincidence per entry (zero only matches zero)."""
    return strict_sign(z) == strict_sign(c)


# -- linear systems -----------------------------------------------------------


def batch_lu_solve(a: np.ndarray, b: np.ndarray | None = None):
    """Gaussian elimination with partial pivoting over a stack of matrices.

    ``a`` has shape ``(k, n, n)``; ``b`` has shape ``(k, n)``, ``(k, n, m)``
    or is None.  Returns ``(x, det, singular)`` where ``singular[i]`` flags a
    pivot column below ``1e-12 * (1 + ||a[i]||_inf)``.  Singular members get
    NaN solutions; their ``det`` is still the product of the computed pivots.
    """
    a = np.array(a, dtype=float)
    if a.ndim == 2:
        a = a[None]
    k, n, _ = a.shape
    rows = np.arange(k)
    eps = PIVOT_REL_EPS * (1.0 + np.abs(a).sum(axis=2).max(axis=1))
    vec = False
    if b is not None:
        b = np.array(b, dtype=float)
        if b.ndim == 2:
            b = b[:, :, None]
            vec = True
    det = np.ones(k)
    singular = np.zeros(k, dtype=bool)
    for j in range(n):
        p = j + np.argmax(np.abs(a[:, j:, j]), axis=1)
        swap = p != j
        if swap.any():
            det[swap] = -det[swap]
            r = rows[swap]
            pj = p[swap]
            tmp = a[r, j].copy()
            a[r, j] = a[r, pj]
            a[r, pj] = tmp
            if b is not None:
                tmp = b[r, j].copy()
                b[r, j] = b[r, pj]
                b[r, pj] = tmp
        piv = a[:, j, j].copy()
        det *= piv
        bad = np.abs(piv) < eps
        singular |= bad
        piv[bad] = 1.0
        if j + 1 < n:
            f = a[:, j + 1 :, j] / piv[:, None]
            a[:, j + 1 :, j + 1 :] -= f[:, :, None] * a[:, j, None, j + 1 :]
            if b is not None:
                b[:, j + 1 :] -= f[:, :, None] * b[:, j, None, :]
        a[:, j, j] = piv
    x = None
    if b is not None:
        x = np.empty_like(b)
        for j in range(n - 1, -1, -1):
            acc = b[:, j] - np.einsum("kl,klm->km", a[:, j, j + 1 :], x[:, j + 1 :])
            x[:, j] = acc / a[:, j, j][:, None]
        x[singular] = np.nan
        if vec:
            x = x[:, :, 0]
    return x, det, singular


def lu_solve(m, b) -> np.ndarray:
    """Solve ``M x = b``; raises SingularMatrix on a numerically zero pivot."""
    a = as_dense(m)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != a.shape[0]:
        raise BadParameter("right-hand side length does not match matrix")
    x, _, singular = batch_lu_solve(a[None], b[None])
    if singular[0]:
        raise SingularMatrix("pivot column is numerically zero")
    return x[0]


def inverse(m) -> np.ndarray:
    a = as_dense(m)
    return lu_solve(a, np.eye(a.shape[0]))


def det(m) -> float:
    _, d, _ = batch_lu_solve(as_dense(m)[None])
    return float(d[0])
