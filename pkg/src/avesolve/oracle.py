"""Exponential-cost ground truth for small systems.

Everything here enumerates all ``2**n`` signatures (bit ``i`` of the mask set
means ``sigma_{i+1} = -1``) and is meant for n up to about 20.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    AveInstance,
    DimensionTooLarge,
    SingularMatrix,
    all_signatures,
    as_dense,
    batch_lu_solve,
    inverse,
    lu_solve,
)

ENUM_LIMIT = 20
RHO_LIMIT = 8
REAL_EPS = 1e-9
DEDUP_TOL = 1e-12
# Boundary solutions come out as +-1e-17 instead of 0; accept that much.
ORTHANT_SLACK = 1e-12
_CHUNK = 4096


def _check_limit(n: int, limit: int) -> None:
    if n > limit:
        raise DimensionTooLarge(f"n = {n} exceeds oracle limit {limit}")


def _signature_batches(n: int):
    """Yield ``(mask_offset, signatures)`` chunks in mask order."""
    total = 2**n
    for start in range(0, total, _CHUNK):
        masks = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)[:, None]
        bits = (masks >> np.arange(n)) & 1
        yield start, (1 - 2 * bits).astype(float)


@dataclass
class Enumeration:
    """All solutions of an AVE found by signature enumeration."""

    solutions: list[np.ndarray]
    signatures: list[list[np.ndarray]]  # every signature that produced each solution
    singular_signatures: list[np.ndarray]

    @property
    def count(self) -> int:
        return len(self.solutions)

    @property
    def degenerate(self) -> bool:
        return bool(self.singular_signatures)

    def unique(self) -> Optional[np.ndarray]:
        if self.count == 1 and not self.degenerate:
            return self.solutions[0]
        return None


def enumerate_solutions(inst: AveInstance, limit: int = ENUM_LIMIT) -> Enumeration:
    """Solve ``(I - S Sigma) z = c`` for every signature and keep orthant-consistent z.

    Solutions equal within ``DEDUP_TOL`` are merged (boundary solutions show
    up under several signatures).
    """
    S = inst.dense()
    c = np.asarray(inst.rhs, dtype=float)
    n = c.size
    _check_limit(n, limit)
    eye = np.eye(n)
    sols: list[np.ndarray] = []
    sigs: list[list[np.ndarray]] = []
    singular: list[np.ndarray] = []
    for _, batch in _signature_batches(n):
        mats = eye - S[None, :, :] * batch[:, None, :]
        x, _, bad = batch_lu_solve(mats, np.broadcast_to(c, (len(batch), n)))
        for i in np.flatnonzero(bad):
            singular.append(batch[i].astype(np.int8))
        good = ~bad
        slack = ORTHANT_SLACK * (1.0 + np.abs(np.nan_to_num(x)).max(axis=1))
        ok = good & np.all(batch * np.nan_to_num(x) >= -slack[:, None], axis=1)
        for i in np.flatnonzero(ok):
            z = x[i]
            sig = batch[i].astype(np.int8)
            for j, known in enumerate(sols):
                if np.abs(known - z).max() <= DEDUP_TOL * max(1.0, np.abs(z).max()):
                    sigs[j].append(sig)
                    break
            else:
                sols.append(z.copy())
                sigs.append([sig])
    return Enumeration(sols, sigs, singular)


def real_spectral_radius(eigs: np.ndarray) -> np.ndarray:
    """Largest |lambda| over the (numerically) real eigenvalues, per row; 0 if none."""
    mag = np.abs(eigs)
    real = np.abs(eigs.imag) <= REAL_EPS * (1.0 + mag)
    return np.where(real, mag, 0.0).max(axis=-1)


def sign_real_spectral_radius(S, limit: int = RHO_LIMIT, cross_check: bool = True) -> float:
    """``max_Sigma rho_0(Sigma S)`` by enumeration.

    For n <= 3 the eigenvalue solver is cross-checked against real roots of
    the characteristic polynomial.
    """
    S = as_dense(S)
    n = S.shape[0]
    _check_limit(n, limit)
    best = 0.0
    for _, batch in _signature_batches(n):
        eigs = np.linalg.eigvals(batch[:, :, None] * S[None])
        best = max(best, float(real_spectral_radius(eigs).max()))
    if cross_check and n <= 3:
        alt = charpoly_rho_s(S)
        if abs(alt - best) > 1e-6 * (1.0 + best):
            raise ArithmeticError(
                f"eigen-solver ({best}) and characteristic polynomial ({alt}) disagree"
            )
    return best


# -- characteristic-polynomial route (n <= 3) ---------------------------------


def charpoly(a: np.ndarray) -> list[float]:
    """Coefficients of ``lambda^n + c1 lambda^(n-1) + ... + cn`` for n <= 3."""
    n = a.shape[0]
    tr = a.trace()
    if n == 1:
        return [1.0, -tr]
    if n == 2:
        return [1.0, -tr, a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]]
    if n == 3:
        m2 = (
            a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
            + a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]
            + a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]
        )
        d = (
            a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
            - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
        )
        return [1.0, -tr, m2, -d]
    raise ValueError("charpoly is implemented for n <= 3 only")


def real_roots(coeffs: list[float], rel_tol: float = 1e-9) -> list[float]:
    """Real roots of a monic polynomial of degree 1..3 (closed forms)."""
    deg = len(coeffs) - 1
    if deg == 1:
        return [-coeffs[1]]
    if deg == 2:
        _, b, c = coeffs
        disc = b * b - 4 * c
        if disc < -rel_tol * (b * b + abs(c) + 1e-300):
            return []
        r = math.sqrt(max(disc, 0.0))
        return [(-b + r) / 2, (-b - r) / 2]
    if deg == 3:
        _, b, c, d = coeffs
        # depressed cubic t^3 + p t + q with lambda = t - b/3
        p = c - b * b / 3
        q = 2 * b**3 / 27 - b * c / 3 + d
        shift = -b / 3
        disc = (q / 2) ** 2 + (p / 3) ** 3
        scale = (abs(q) / 2) ** 2 + abs(p / 3) ** 3 + 1e-300
        if abs(disc) <= rel_tol * scale:
            # repeated root
            if abs(p) <= rel_tol * (abs(b * b) + abs(c) + 1e-300):
                return [shift] * 3
            u = math.copysign(abs(q / 2) ** (1 / 3), -q)
            return [2 * u + shift, -u + shift, -u + shift]
        if disc > 0:
            s = math.sqrt(disc)
            u = math.copysign(abs(-q / 2 + s) ** (1 / 3), -q / 2 + s)
            v = math.copysign(abs(-q / 2 - s) ** (1 / 3), -q / 2 - s)
            return [u + v + shift]
        r = 2 * math.sqrt(-p / 3)
        phi = math.acos(max(-1.0, min(1.0, 3 * q / (p * r))))
        return [r * math.cos((phi - 2 * math.pi * k) / 3) + shift for k in range(3)]
    raise ValueError("degree must be 1, 2 or 3")


def charpoly_rho_s(S) -> float:
    S = as_dense(S)
    n = S.shape[0]
    best = 0.0
    for sig in all_signatures(n):
        roots = real_roots(charpoly(sig[:, None] * S))
        if roots:
            best = max(best, max(abs(r) for r in roots))
    return best


# -- determinants, P-matrices, LCP --------------------------------------------


def signature_determinants(S) -> np.ndarray:
    """``det(I - S Sigma)`` for every signature, in mask order."""
    S = as_dense(S)
    n = S.shape[0]
    out = []
    eye = np.eye(n)
    for _, batch in _signature_batches(n):
        _, d, _ = batch_lu_solve(eye - S[None] * batch[:, None, :])
        out.append(d)
    return np.concatenate(out)


def det_scale(S) -> float:
    """Upper bound on ``|det(I - S Sigma)|``: product of the row 1-norms."""
    S = as_dense(S)
    rows = 1.0 + np.abs(S).sum(axis=1)
    return float(np.prod(rows))


def principal_minors(M) -> np.ndarray:
    """All ``2**n - 1`` principal minors, indexed by subset mask - 1."""
    M = as_dense(M)
    n = M.shape[0]
    out = np.empty(2**n - 1)
    for k in range(1, n + 1):
        subsets = list(itertools.combinations(range(n), k))
        idx = np.array(subsets)
        blocks = M[idx[:, :, None], idx[:, None, :]]
        _, d, _ = batch_lu_solve(blocks)
        masks = [sum(1 << i for i in sub) for sub in subsets]
        out[np.array(masks) - 1] = d
    return out


def p_matrix_check(M, limit: int = ENUM_LIMIT, guard: float = 0.0) -> bool:
    """True iff every principal minor exceeds ``guard``."""
    M = as_dense(M)
    _check_limit(M.shape[0], limit)
    return bool(np.all(principal_minors(M) > guard))


@dataclass
class LcpInstance:
    """``w = M u + q``, ``u, w >= 0``, ``u^T w = 0``."""

    M: np.ndarray
    q: np.ndarray


def to_lcp(inst: AveInstance) -> LcpInstance:
    """LCP form of ``z - S|z| = c``.

    With ``w = max(z, 0)`` and ``u = max(-z, 0)`` the equation reads
    ``(I - S) w = c + (I + S) u``, so ``M = (I - S)^-1 (I + S)`` and
    ``q = (I - S)^-1 c``.
    """
    S = inst.dense()
    n = S.shape[0]
    eye = np.eye(n)
    inv = inverse(eye - S)  # raises SingularMatrix
    return LcpInstance(M=inv @ (eye + S), q=inv @ inst.rhs)


def split_solution(z) -> tuple[np.ndarray, np.ndarray]:
    """``z -> (u, w)`` with ``u = max(-z, 0)``, ``w = max(z, 0)``."""
    z = np.asarray(z, dtype=float)
    return np.maximum(-z, 0.0), np.maximum(z, 0.0)


def join_solution(u, w) -> np.ndarray:
    return np.asarray(w, dtype=float) - np.asarray(u, dtype=float)


def lcp_violation(lcp: LcpInstance, u, w) -> float:
    """Largest violation of ``w = Mu + q``, nonnegativity and complementarity."""
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    eq = np.abs(lcp.M @ u + lcp.q - w).max()
    neg = max(0.0, -u.min(), -w.min())
    comp = abs(float(u @ w))
    return float(max(eq, neg, comp))


def equilibrium_to_ave(A, b) -> AveInstance:
    """``Ax + max(0, x) = b``  ->  ``x - (-B^-1)|x| = 2 B^-1 b`` with ``B = 2A + I``."""
    A = as_dense(A)
    b = np.asarray(b, dtype=float)
    B = 2.0 * A + np.eye(A.shape[0])
    binv = inverse(B)
    return AveInstance(0.0 - binv, 2.0 * (binv @ b))


def equilibrium_residual(A, b, x) -> np.ndarray:
    A = as_dense(A)
    x = np.asarray(x, dtype=float)
    return A @ x + np.maximum(0.0, x) - np.asarray(b, dtype=float)


# -- unique-solvability report--------------------------------------------------


@dataclass
class SolvabilityReport:
    rho_s: float
    det_all_positive: bool
    min_det: float
    p_matrix: Optional[bool]  # None when I - S is singular
    solution_count: int
    singular_signatures: list[np.ndarray] = field(default_factory=list)
    det_scale: float = 1.0
    # Sampling checks, not exhaustive:
    det_diag_samples: int = 0
    det_diag_all_positive: bool = True
    rhs_samples: int = 0
    rhs_all_unique: bool = True

    @property
    def rho_below_one(self) -> bool:
        return self.rho_s < 1.0

    def as_dict(self) -> dict:
        from .core import signature_string

        return {
            "rho_s": self.rho_s,
            "det_all_positive": self.det_all_positive,
            "min_det": self.min_det,
            "p_matrix": "undefined" if self.p_matrix is None else self.p_matrix,
            "solution_count": self.solution_count,
            "singular_signatures": [signature_string(s) for s in self.singular_signatures],
            "det_diag_samples (sampled)": self.det_diag_samples,
            "det_diag_all_positive (sampled)": self.det_diag_all_positive,
            "rhs_samples (sampled)": self.rhs_samples,
            "rhs_all_unique (sampled)": self.rhs_all_unique,
        }


def check_unique_solvability(
    S,
    limit: int = RHO_LIMIT,
    rhs=None,
    seed: int = 0,
    samples: int = 20,
) -> SolvabilityReport:
    """Evaluate the equivalent unique-solvability criteria on one matrix.

    ``rho_s``, the signature determinants and the P-matrix test are
    exhaustive.  ``det(I - S D)`` for diagonal ``|D| <= 1`` and uniqueness
    for arbitrary right-hand sides are only sampled (``samples`` draws each).
    """
    S = as_dense(S)
    n = S.shape[0]
    _check_limit(n, limit)
    rng = np.random.default_rng(seed)
    rho = sign_real_spectral_radius(S, limit=limit)
    dets = signature_determinants(S)
    eye = np.eye(n)
    try:
        M = lu_solve(eye - S, eye + S)
        pm: Optional[bool] = p_matrix_check(M, limit=limit)
    except SingularMatrix:
        pm = None
    if rhs is None:
        rhs = rng.uniform(-1.0, 1.0, n)
    en = enumerate_solutions(AveInstance(S, rhs), limit=limit)

    dvals = rng.uniform(-1.0, 1.0, (samples, n))
    _, ddet, _ = batch_lu_solve(eye - S[None] * dvals[:, None, :])
    unique = True
    for _ in range(samples):
        e = enumerate_solutions(AveInstance(S, rng.uniform(-1.0, 1.0, n)), limit=limit)
        unique &= e.unique() is not None
    return SolvabilityReport(
        rho_s=rho,
        det_all_positive=bool(np.all(dets > 0.0)),
        min_det=float(dets.min()),
        p_matrix=pm,
        solution_count=en.count,
        singular_signatures=en.singular_signatures,
        det_scale=det_scale(S),
        det_diag_samples=samples,
        det_diag_all_positive=bool(np.all(ddet > 0.0)),
        rhs_samples=samples,
        rhs_all_unique=bool(unique),
    )
