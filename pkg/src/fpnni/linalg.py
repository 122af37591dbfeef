"""Small dense symmetric linear algebra.

Everything here targets the tiny matrices (n <= ~10) that parameterize the
network models: a cyclic-Jacobi symmetric eigensolver, the spectral norm
sqrt(lambda_max(A^T A)), SPD square roots, and signed definiteness checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NoConvergence, NotPositiveDefinite, NotSymmetric

# Relative tolerance for accepting an input as symmetric (max-norm).
SYMMETRY_RTOL = 1e-12
# Jacobi sweep budget and off-diagonal Frobenius stopping threshold.
SWEEP_BUDGET = 100
OFFDIAG_RTOL = 1e-14
# Smallest eigenvalue accepted as positive definite.
SPD_FLOOR = 1e-12


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d float array, rejecting empty or non-finite input."""
    m = np.array(a, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def as_vector(v) -> np.ndarray:
    """Coerce to a 1-d float array, rejecting empty or non-finite input."""
    w = np.atleast_1d(np.array(v, dtype=float))
    if w.ndim != 1 or w.size < 1:
        raise ValueError(f"expected a 1-d vector, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("vector entries must be finite")
    return w


@dataclass(frozen=True)
class SymEigen:
    """Eigen-decomposition S = V diag(values) V^T with values ascending."""

    values: np.ndarray
    vectors: np.ndarray  # orthonormal columns; vectors[:, i] pairs with values[i]

    @property
    def lambda_min(self) -> float:
        return float(self.values[0])

    @property
    def lambda_max(self) -> float:
        return float(self.values[-1])


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def sym_eigen(s, sweep_budget: int = SWEEP_BUDGET) -> SymEigen:
    """Diagonalize a symmetric matrix by cyclic Jacobi rotations.

    Inputs within ``SYMMETRY_RTOL`` of symmetric are symmetrized as
    (S + S^T)/2 before decomposition; anything further off raises
    ``NotSymmetric``.  Exhausting the sweep budget raises ``NoConvergence``
    (which, for matrices this small, signals pathological input).
    """
    s = as_matrix(s)
    n, m = s.shape
    if n != m:
        raise NotSymmetric(f"matrix is {n}x{m}, not square")
    scale = float(np.abs(s).max())
    if scale > 0.0 and float(np.abs(s - s.T).max()) > SYMMETRY_RTOL * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-12 relative tolerance")

    a = 0.5 * (s + s.T)
    v = np.eye(n)
    threshold = OFFDIAG_RTOL * float(np.linalg.norm(a))

    converged = False
    for _ in range(sweep_budget + 1):
        if _offdiag_norm(a) <= threshold:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-154 * abs(diff):
                    # rotation angle underflows; zero the entry directly
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = diff / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                sn = t * c
                # A <- J^T A J on the (p, q) plane
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - sn * aq
                a[:, q] = sn * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - sn * aq
                a[q, :] = sn * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - sn * vq
                v[:, q] = sn * vp + c * vq
    if not converged:
        raise NoConvergence(
            f"Jacobi eigensolver did not converge within {sweep_budget} sweeps"
        )

    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    return SymEigen(values=values[order], vectors=v[:, order])


def spectral_norm(a) -> float:
    """Spectral norm sqrt(lambda_max(A^T A)); works for rectangular A."""
    a = as_matrix(a)
    gram = a.T @ a
    top = sym_eigen(gram).lambda_max
    return math.sqrt(max(top, 0.0))


def spd_sqrt(q) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric square root and inverse square root of an SPD matrix.

    Returns (Q^{1/2}, Q^{-1/2}).  Raises ``NotPositiveDefinite`` when
    lambda_min(Q) <= 1e-12.
    """
    eig = sym_eigen(q)
    if eig.lambda_min <= SPD_FLOOR:
        raise NotPositiveDefinite(
            f"lambda_min = {eig.lambda_min:.3e} <= {SPD_FLOOR:.0e}"
        )
    roots = np.sqrt(eig.values)
    v = eig.vectors
    half = (v * roots) @ v.T
    neg_half = (v / roots) @ v.T
    return half, neg_half


class SemidefiniteCheck(NamedTuple):
    """Definiteness verdict with the extremal eigenvalue as signed margin."""

    ok: bool
    margin: float


def is_negative_semidefinite(s, tol: float = 0.0) -> SemidefiniteCheck:
    """True iff lambda_max(S) <= tol; margin carries lambda_max itself."""
    top = sym_eigen(s).lambda_max
    return SemidefiniteCheck(ok=top <= tol, margin=top)


def is_positive_definite(s, tol: float = 0.0) -> SemidefiniteCheck:
    """True iff lambda_min(S) > tol; margin carries lambda_min itself."""
    bottom = sym_eigen(s).lambda_min
    return SemidefiniteCheck(ok=bottom > tol, margin=bottom)
