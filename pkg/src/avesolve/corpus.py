"""Counterexample catalog and seeded random instance generators.

Catalog entries store a matrix constructor and a solution ``z``; the
right-hand side is always recomputed as ``z - S|z|``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    AveError,
    AveInstance,
    BadParameter,
    StructureClass,
    TriDiagMatrix,
    classify,
    inf_norm,
    inverse,
    is_strict_diag_dominant,
    strict_sign,
)
from .sge_dense import choose_sign, select_pivot, sge_solve


class UnknownId(AveError, KeyError):
    pass


class Property(enum.Enum):
    SignMismatchAtMax = "sign(c_k) != sign(z_k) for some k in C_max"
    InverseNotDominant = "(I - S)^-1 is not strictly diagonally dominant"
    SgeFirstSignWrong = "first SGE sign guess contradicts a nonzero z_k"
    DegenerateZeroRhs = "c = 0 although z != 0; SGE returns z = 0"


@dataclass
class CatalogCase:
    id: str
    n: int
    eps: float
    S: np.ndarray
    z: np.ndarray
    instance: AveInstance
    expected_property: Property

    def check(self) -> bool:
        return PROPERTY_CHECKS[self.expected_property](self)


# -- property checks ------------------------------------------------------------


def _sign_mismatch_at_max(case: CatalogCase) -> bool:
    c = case.instance.rhs
    cmax = np.flatnonzero(np.abs(c) == np.abs(c).max())
    return bool(np.any(strict_sign(c[cmax]) != strict_sign(case.z[cmax])))


def _inverse_not_dominant(case: CatalogCase) -> bool:
    a = inverse(np.eye(case.n) - case.S)
    return not is_strict_diag_dominant(a)


def _first_sign_wrong(case: CatalogCase) -> bool:
    c = case.instance.rhs
    k = select_pivot(c, 0)
    zk = case.z[k]
    return zk != 0.0 and choose_sign(c[k]) != strict_sign(zk)


def _degenerate_zero_rhs(case: CatalogCase) -> bool:
    c = case.instance.rhs
    if np.any(c != 0.0) or not np.any(case.z != 0.0):
        return False
    sol = sge_solve(case.instance)
    return _first_sign_wrong(case) and bool(np.all(sol.z == 0.0))


PROPERTY_CHECKS: dict[Property, Callable[[CatalogCase], bool]] = {
    Property.SignMismatchAtMax: _sign_mismatch_at_max,
    Property.InverseNotDominant: _inverse_not_dominant,
    Property.SgeFirstSignWrong: _first_sign_wrong,
    Property.DegenerateZeroRhs: _degenerate_zero_rhs,
}


# -- constructors -----------------------------------------------------------------


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise BadParameter(msg)


def _zero_at_max(n, eps):
    _need(n >= 2, "needs n >= 2")
    S = np.zeros((n, n))
    S[:, 1] = 0.5
    z = np.ones(n)
    z[0] = 0.0
    return S, z


def _reducible_half(n, eps):
    # Same matrix: column 2 filled with 1/2; (I - S)^-1 = I + (ones in column 2).
    return _zero_at_max(n, eps)


def _eps_above_half(n, eps):
    # Irreducible variant: row 1 couples to 2 with 1/2 + eps, a chain of 1/2
    # couplings runs 2 -> 3 -> ... -> n, node n keeps weight 1/2 on itself and
    # closes the cycle with eps back to node 1.  Row 1 of (I - S)^-1 then has
    # off-diagonal mass (1 + 2 eps) times its diagonal.
    _need(n >= 2, "needs n >= 2")
    _need(0.0 < eps < 0.5, "needs 0 < eps < 1/2")
    S = np.zeros((n, n))
    S[0, 1] = 0.5 + eps
    for i in range(1, n - 1):
        S[i, i + 1] = 0.5
    S[n - 1, n - 1] += 0.5
    S[n - 1, 0] += eps
    return S, np.ones(n)


def _irreducible_sharp(n, eps):
    # Row 1 is (eps/2, (1+eps)/2, 0, ...), z = (eps/2, 1, ..., 1) so c_1 < 0 is
    # the strict maximum.  Rows 2..n form the cycle 2 -> 3 -> ... -> n -> {1, 2}
    # with weights 1/2; the back edge to node 1 has weight delta = eps^2/8,
    # small enough that |c_n| = 1/2 + delta(1 - eps/2) stays below |c_1|.
    _need(n >= 2, "needs n >= 2")
    _need(0.0 < eps < 0.5, "needs 0 < eps < 1/2")
    delta = eps * eps / 8.0
    S = np.zeros((n, n))
    S[0, 0] = eps / 2.0
    S[0, 1] = (1.0 + eps) / 2.0
    for i in range(1, n - 1):
        S[i, i + 1] = 0.5
    S[n - 1, 0] += delta
    S[n - 1, 1] += 0.5 - delta
    z = np.ones(n)
    z[0] = eps / 2.0
    return S, z


def _tridiag_sharp(n, eps):
    _need(n >= 1, "needs n >= 1")
    return -np.eye(n), -np.ones(n)


def _diagdom_sharp(n, eps):
    _need(n >= 2, "needs n >= 2")
    _need(eps > 0.0 and 1.0 - eps > n / (n + 1.0), "needs eps > 0 and 1 - eps > n/(n+1)")
    top = 2.0 / 3.0 + 1.0 / (3.0 * (n + 1))
    S = np.diag(np.full(n, top))
    S[0, 0] = 1.0 / 3.0 + 1.0 / (3.0 * (n + 1))
    S[0, 1:] = 1.0 / (3.0 * (n - 1))
    z = np.ones(n)
    z[0] = (n + 1.0) / (2.0 * n + 1.0) * eps
    return S, z


CATALOG: dict[str, tuple[Callable, Property]] = {
    "reducible-half": (_reducible_half, Property.InverseNotDominant),
    "eps-above-half": (_eps_above_half, Property.InverseNotDominant),
    "zero-at-max": (_zero_at_max, Property.SignMismatchAtMax),
    "irreducible-sharp": (_irreducible_sharp, Property.SgeFirstSignWrong),
    "tridiag-sharp": (_tridiag_sharp, Property.DegenerateZeroRhs),
    "diagdom-sharp": (_diagdom_sharp, Property.SgeFirstSignWrong),
}


def catalog(id: str, n: int = 2, eps: float = 1e-3, check: bool = True) -> CatalogCase:
    """Build catalog entry ``id``; asserts its expected property unless ``check=False``."""
    try:
        build, prop = CATALOG[id]
    except KeyError:
        raise UnknownId(f"unknown catalog id {id!r}; known: {', '.join(CATALOG)}") from None
    S, z = build(int(n), float(eps))
    inst = AveInstance(S, z - S @ np.abs(z))
    case = CatalogCase(id, int(n), float(eps), S, z, inst, prop)
    if check and not case.check():
        raise AssertionError(f"catalog entry {id} (n={n}, eps={eps}) lacks {prop.name}")
    return case


# -- archived tridiagonal failures -----------------------------------------------
#
# Tridiagonal matrices with ||S||_inf < 1 on which the max-|c| sign rule fails.
# All entries are dyadic rationals, so S, z and c = z - S|z| are exact in
# binary floating point.  Found by random search against the enumeration
# oracle (scripts/tridiag_stress.py) and rounded to short fractions.

ARCHIVE: dict[str, tuple[np.ndarray, np.ndarray]] = {
    # asymmetric, n = 2, ||S|| = 11/16: c = (1/2, 49/128), z_1 = -1/8
    "tridiag-asym-2": (
        np.array([[0.0, -5 / 8], [-1 / 16, 5 / 8]]),
        np.array([-1 / 8, 1.0]),
    ),
    # symmetric, n = 3, ||S|| = 63/64: c_2 = -11273/16384 is the maximum, z_2 = 3/32
    "tridiag-sym-3": (
        np.array([
            [-43 / 128, 15 / 32, 0.0],
            [15 / 32, 7 / 128, 59 / 128],
            [0.0, 59 / 128, 19 / 64],
        ]),
        np.array([-99 / 128, 3 / 32, 115 / 128]),
    ),
}


def archived(id: str) -> CatalogCase:
    """Archived tridiagonal counterexample ``id`` (see ``ARCHIVE``)."""
    try:
        S, z = ARCHIVE[id]
    except KeyError:
        raise UnknownId(f"unknown archive id {id!r}; known: {', '.join(ARCHIVE)}") from None
    S = S.copy()
    inst = AveInstance(TriDiagMatrix.from_dense(S), z - S @ np.abs(z))
    return CatalogCase(id, S.shape[0], 0.0, S, z.copy(), inst, Property.SgeFirstSignWrong)


# -- random generators --------------------------------------------------------------


ADMISSIBLE = {
    StructureClass.NormBelowHalf: (0.0, 0.5),
    StructureClass.IrreducibleNormAtMostHalf: (0.5, np.inf),
    StructureClass.DiagDominantNormAtMostTwoThirds: (0.5, 2.0 / 3.0),
    StructureClass.TridiagonalNormBelowOne: (2.0 / 3.0, 1.0),
}


def _scale_to(S, target: float, strict: bool):
    """Scale so that ||S||_inf is ``target`` (just below it when ``strict``)."""
    S = S * (target / inf_norm(S))
    shrink = 1.0 - 2.0**-52
    while inf_norm(S) > target or (strict and inf_norm(S) >= target):
        S = S * shrink
    return S


def _scale_exactly(S, target: float):
    """Scale so that the computed ||S||_inf equals ``target`` to the last bit."""
    S = S * (target / inf_norm(S))
    for _ in range(200):
        sums = np.abs(S).sum(axis=1)
        top = sums.max()
        if top == target:
            return S
        i = int(np.argmax(sums))
        j = int(np.argmax(np.abs(S[i])))
        toward = np.copysign(np.inf, S[i, j]) if top < target else 0.0
        S[i, j] = np.nextafter(S[i, j], toward)
        if top > target:
            over = sums > target
            S[over] *= 1.0 - 2.0**-52
    raise RuntimeError("could not hit the target norm exactly")


def _nonzero_uniform(rng, size):
    x = rng.uniform(-1.0, 1.0, size)
    x[x == 0.0] = 0.5
    return x


def _random_tridiag(rng, n, target, symmetric):
    diag = _nonzero_uniform(rng, n)
    sup = _nonzero_uniform(rng, n - 1)
    sub = sup.copy() if symmetric else _nonzero_uniform(rng, n - 1)
    m = TriDiagMatrix(sub, diag, sup)
    scale = target / inf_norm(m)
    shrink = 1.0 - 2.0**-52
    while True:
        m = TriDiagMatrix(sub * scale, diag * scale, sup * scale)
        if inf_norm(m) < target:
            return m
        scale *= shrink


def gen_matrix(kind: StructureClass, n: int, norm_bound: float, rng,
               symmetric: bool = False):
    """Random S with ``classify(S) == kind``.

    Class 2 matrices have norm exactly 1/2 (anything below would be class 1).
    Class 3 and 4 matrices get norm ``norm_bound``, kept strictly above the
    previous class's bound so they do not fall into an earlier class.
    Class 4 returns a :class:`TriDiagMatrix`.
    """
    if kind not in ADMISSIBLE:
        raise BadParameter(f"cannot generate {kind.name} matrices")
    lo, hi = ADMISSIBLE[kind]
    if n < 1:
        raise BadParameter("n must be positive")
    if kind is StructureClass.IrreducibleNormAtMostHalf:
        if norm_bound < 0.5:
            raise BadParameter("IrreducibleNormAtMostHalf needs norm_bound >= 1/2")
    elif not lo < norm_bound <= hi:
        raise BadParameter(f"{kind.name} needs {lo} < norm_bound <= {hi}")

    if kind is StructureClass.NormBelowHalf:
        density = rng.uniform(0.2, 1.0)
        S = _nonzero_uniform(rng, (n, n)) * (rng.random((n, n)) < density)
        S[np.arange(n), rng.integers(0, n, n)] = _nonzero_uniform(rng, n)
        return _scale_to(S, norm_bound, strict=True)

    if kind is StructureClass.IrreducibleNormAtMostHalf:
        density = rng.uniform(0.0, 1.0)
        mask = rng.random((n, n)) < density
        cycle = rng.permutation(n)
        mask[cycle, np.roll(cycle, -1)] = True
        S = _nonzero_uniform(rng, (n, n)) * mask
        return _scale_exactly(S, 0.5)

    if kind is StructureClass.DiagDominantNormAtMostTwoThirds:
        density = rng.uniform(0.0, 1.0)
        S = _nonzero_uniform(rng, (n, n)) * (rng.random((n, n)) < density)
        off = np.abs(S).sum(axis=1) - np.abs(np.diag(S))
        margin = rng.uniform(0.05, 1.0, n)
        diag = (off * (1.0 + margin) + margin) * rng.choice([-1.0, 1.0], n)
        S[np.arange(n), np.arange(n)] = diag
        return _scale_to(S, norm_bound, strict=False)

    return _random_tridiag(rng, n, norm_bound if norm_bound < 1.0 else 1.0, symmetric)


def gen_random(
    kind: StructureClass,
    n: int,
    norm_bound: float,
    seed: int,
    zero_prob: float = 0.0,
    symmetric: bool = False,
):
    """Seeded random instance of class ``kind`` with known solution.

    Returns ``(instance, z)``.  Entries of ``z`` are uniform on [-1, 1] and
    forced to zero with probability ``zero_prob``.  Output is reproducible
    bit-for-bit from the arguments (numpy PCG64 stream).
    """
    if not 0.0 <= zero_prob <= 1.0:
        raise BadParameter("zero_prob must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    S = gen_matrix(kind, n, norm_bound, rng, symmetric=symmetric)
    got = classify(S)
    if got is not kind:
        raise RuntimeError(f"generator produced {got.name}, wanted {kind.name}")
    z = rng.uniform(-1.0, 1.0, n)
    if zero_prob:
        z[rng.random(n) < zero_prob] = 0.0
    if isinstance(S, TriDiagMatrix):
        c = z - S.matvec(np.abs(z))
    else:
        c = z - S @ np.abs(z)
    return AveInstance(S, c), z


def gen_equilibrium(n: int, seed: int, max_tries: int = 1000):
    """Random ``(A, b)`` whose AVE form has ``||S||_inf < 1`` in a solvable class."""
    from .oracle import equilibrium_to_ave

    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        off = rng.uniform(-1.0, 1.0, (n, n))
        np.fill_diagonal(off, 0.0)
        rowsum = np.abs(off).sum(axis=1)
        # |B_ii| - sum_j |B_ij| >= 2 bounds ||B^-1||_inf by 1/2 (Varah).
        gap = rng.uniform(1.2, 3.0, n)
        B = off + np.diag((rowsum + gap) * rng.choice([-1.0, 1.0], n))
        A = (B - np.eye(n)) / 2.0
        b = rng.uniform(-1.0, 1.0, n)
        try:
            inst = equilibrium_to_ave(A, b)
        except AveError:
            continue
        if inf_norm(inst.matrix) < 1.0 and classify(inst.matrix) is not StructureClass.Unclassified:
            return A, b, inst
    raise RuntimeError("no admissible equilibrium instance found")
