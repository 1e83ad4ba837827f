"""Dense symmetric linear algebra: SPD factorization, solves, extreme eigenvalues.

Sized for matrices of order up to a few hundred; column-at-a-time updates keep
the Python-level loop count linear in the order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite

DEFAULT_PIVOT_FLOOR = 1e-10

_SYMMETRY_RTOL = 1e-12


def as_symmetric(m: np.ndarray) -> np.ndarray:
    """Validate and return a dense symmetric matrix as float64.

    Raises DimensionMismatch if `m` is not square or not symmetric to
    relative tolerance 1e-12.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if not np.allclose(a, a.T, rtol=0.0, atol=_SYMMETRY_RTOL * max(scale, 1.0)):
        raise DimensionMismatch("matrix is not symmetric")
    return a


@dataclass(frozen=True)
class SpdFactorization:
    """Lower-triangular Cholesky factor of a symmetric positive definite matrix.

    `lower @ lower.T` reconstructs the source matrix; `pivot_floor` is the
    relative tolerance below which a Schur pivot is rejected.
    """

    order: int
    lower: np.ndarray
    pivot_floor: float


def cholesky(m: np.ndarray, pivot_floor: float = DEFAULT_PIVOT_FLOOR) -> SpdFactorization:
    """Factor a symmetric matrix as L L^T with a relative pivot floor.

    Every Schur pivot must exceed ``pivot_floor * max(diag(m))``; otherwise
    the matrix is treated as numerically singular or indefinite and
    NotPositiveDefinite is raised.
    """
    if pivot_floor <= 0.0:
        raise ValueError("pivot_floor must be positive")
    a = as_symmetric(m)
    n = a.shape[0]
    threshold = pivot_floor * max(float(np.max(np.diag(a))), 0.0)
    lower = np.zeros((n, n))
    for j in range(n):
        pivot = a[j, j] - lower[j, :j] @ lower[j, :j]
        if pivot <= threshold:
            raise NotPositiveDefinite(
                f"pivot {pivot:.3e} at column {j} is at or below floor {threshold:.3e}"
            )
        ljj = math.sqrt(pivot)
        lower[j, j] = ljj
        if j + 1 < n:
            lower[j + 1 :, j] = (a[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / ljj
    return SpdFactorization(order=n, lower=lower, pivot_floor=pivot_floor)


def solve_spd(f: SpdFactorization, b: np.ndarray) -> np.ndarray:
    """Solve (L L^T) x = b given the factorization.

    `b` may be a vector or a matrix of stacked right-hand-side columns; the
    result has the same shape.
    """
    rhs = np.asarray(b, dtype=float)
    if rhs.shape[0] != f.order:
        raise DimensionMismatch(
            f"right-hand side has leading dimension {rhs.shape[0]}, expected {f.order}"
        )
    lower = f.lower
    n = f.order
    y = rhs.copy()
    for i in range(n):
        y[i] = (rhs[i] - lower[i, :i] @ y[:i]) / lower[i, i]
    x = y
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - lower[i + 1 :, i] @ x[i + 1 :]) / lower[i, i]
    return x


def spd_inverse_diagonal(f: SpdFactorization) -> np.ndarray:
    """Diagonal of the inverse, via solves against the identity."""
    inv = solve_spd(f, np.eye(f.order))
    return np.diag(inv).copy()


def sym_eigen_extremes(m: np.ndarray, max_sweeps: int = 60) -> tuple[float, float]:
    """Smallest and largest eigenvalues of a symmetric matrix.

    Cyclic Jacobi rotations run until the off-diagonal mass is negligible
    relative to the Frobenius norm, which is plenty for the 1e-8 relative
    accuracy this module promises.
    """
    a = as_symmetric(m).copy()
    n = a.shape[0]
    if n == 1:
        v = float(a[0, 0])
        return v, v
    stop = 1e-14 * max(float(np.linalg.norm(a)), 1e-300)
    for _ in range(max_sweeps):
        off = math.sqrt(max(float(np.sum(a * a) - np.sum(np.diag(a) ** 2)), 0.0))
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= stop / n:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
    diag = np.diag(a)
    return float(np.min(diag)), float(np.max(diag))
