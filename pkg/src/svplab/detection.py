"""Exact detection of support vector proliferation for the l2 formulation.

The verdict comes from the sign pattern of the minimum-norm interpolator's
dual direction K^{-1} y; equivalent leave-one-out statistics and projection
coordinates are exposed for cross-checking and diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DegenerateDual, NotPositiveDefinite, SingularGram, SingularMinor
from .sampling import Dataset

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SvpVerdict:
    """Outcome of an SVP check.

    `alpha_direction` is the unnormalized dual direction (its signs carry the
    verdict), `loo_stats` the per-sample leave-one-out statistics (empty when
    degenerate or undefined for the norm), and `min_margin_slack` the margin
    min_i(1 - loo_stats[i]) by which the strict inequalities hold.
    """

    svp: bool
    alpha_direction: np.ndarray
    loo_stats: np.ndarray
    min_margin_slack: float
    degenerate: bool
    tolerance_used: float


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    """Projection of the origin onto the affine hull of the signed samples.

    `barycentric` holds the affine coefficients (summing to one) of the
    projection point; SVP holds exactly when all of them are positive.
    """

    point: np.ndarray
    barycentric: np.ndarray
    squared_norm: float


def gram(ds: Dataset) -> np.ndarray:
    """Gram matrix X X^T, exactly symmetric by mirroring the upper triangle."""
    k = ds.X @ ds.X.T
    upper = np.triu(k)
    return upper + np.triu(k, 1).T


def signed_rows(ds: Dataset) -> np.ndarray:
    """Rows y_i * x_i, the samples with labels folded in."""
    return ds.y[:, None] * ds.X


def detect_svp_l2(ds: Dataset, tol: float = DEFAULT_TOL) -> SvpVerdict:
    """Decide SVP from the dual direction K^{-1} y.

    One SPD solve gives beta = K^{-1} y; n solves against unit vectors give
    diag(K^{-1}); the leave-one-out statistics follow from the Schur
    complement identity loo_i = 1 - y_i beta_i / (K^{-1})_{ii}. SVP holds iff
    every y_i beta_i clears tol * max|beta|. A failed factorization marks the
    trial degenerate instead of raising.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    k = gram(ds)
    try:
        fact = linalg.cholesky(k)
    except NotPositiveDefinite:
        return SvpVerdict(
            svp=False,
            alpha_direction=np.empty(0),
            loo_stats=np.empty(0),
            min_margin_slack=float("nan"),
            degenerate=True,
            tolerance_used=tol,
        )
    beta = linalg.solve_spd(fact, ds.y)
    inv_diag = linalg.spd_inverse_diagonal(fact)
    alpha_direction = ds.y * beta
    loo_stats = 1.0 - alpha_direction / inv_diag
    scale = float(np.max(np.abs(beta)))
    svp = bool(np.all(alpha_direction > tol * scale))
    return SvpVerdict(
        svp=svp,
        alpha_direction=alpha_direction,
        loo_stats=loo_stats,
        min_margin_slack=float(np.min(1.0 - loo_stats)),
        degenerate=False,
        tolerance_used=tol,
    )


def loo_statistics_direct(ds: Dataset) -> np.ndarray:
    """Leave-one-out statistics computed from first principles.

    For each i, forms the Gram minor without sample i, solves it against
    X_{\\i} x_i, and contracts with the remaining labels. O(n^4) reference
    path that the fast Schur-identity route is checked against.
    """
    n = ds.n
    k = gram(ds)
    stats = np.empty(n)
    for i in range(n):
        keep = np.arange(n) != i
        minor = k[np.ix_(keep, keep)]
        rhs = ds.X[keep] @ ds.X[i]
        try:
            u = np.linalg.solve(minor, rhs)
        except np.linalg.LinAlgError:
            raise SingularMinor(i) from None
        stats[i] = ds.y[i] * (ds.y[keep] @ u)
    return stats


def projection_point(ds: Dataset) -> ProjectionResult:
    """Project the origin onto the affine hull of the signed samples.

    The point is A^T (A A^T)^{-1} 1 normalized by s = 1^T (A A^T)^{-1} 1,
    with barycentric coordinates (A A^T)^{-1} 1 / s and squared norm 1/s.
    """
    a = signed_rows(ds)
    m = a @ a.T
    m = np.triu(m) + np.triu(m, 1).T
    ones = np.ones(ds.n)
    try:
        u = np.linalg.solve(m, ones)
    except np.linalg.LinAlgError:
        raise SingularGram("signed Gram matrix is singular") from None
    s = float(ones @ u)
    if s <= 1e-12 * float(np.max(np.abs(u))):
        raise DegenerateDual(f"normalization constant {s:.3e} is numerically zero")
    barycentric = u / s
    point = a.T @ barycentric
    return ProjectionResult(point=point, barycentric=barycentric, squared_norm=1.0 / s)


def decomposition_terms(ds: Dataset, i: int, m: int) -> tuple[float, float, float]:
    """Split the i-th leave-one-out statistic into its three analysis terms.

    t1 contracts against (K_minor^{-1} - I/||lam||_1), t2 covers the leading
    block of m samples (excluding i), t3 the tail; t1 + t2 + t3 equals the
    direct leave-one-out statistic exactly. `i` is a 0-based sample index and
    must lie in the leading block: 0 <= i < m <= n.

    Diagnostic only; detection never calls this.
    """
    n = ds.n
    if not 0 <= i < m <= n:
        raise ValueError(f"need 0 <= i < m <= n, got i={i}, m={m}, n={n}")
    lam_l1 = float(np.sum(ds.lam))
    k = gram(ds)
    keep = np.arange(n) != i
    minor = k[np.ix_(keep, keep)]
    rhs = ds.X[keep] @ ds.X[i]
    try:
        u = np.linalg.solve(minor, rhs)
    except np.linalg.LinAlgError:
        raise SingularMinor(i) from None
    y_rest = ds.y[keep]
    t1 = ds.y[i] * float(y_rest @ (u - rhs / lam_l1))
    lead = np.zeros(n, dtype=bool)
    lead[:m] = True
    lead[i] = False
    tail = np.zeros(n, dtype=bool)
    tail[m:] = True
    t2 = ds.y[i] * float(ds.y[lead] @ (ds.X[lead] @ ds.X[i])) / lam_l1
    t3 = ds.y[i] * float(ds.y[tail] @ (ds.X[tail] @ ds.X[i])) / lam_l1
    return t1, t2, t3


def gram_deviation(ds: Dataset) -> float:
    """Relative spectral deviation of the Gram matrix from ||lam||_1 * I.

    Computed as max(|mu_max - ||lam||_1|, |mu_min - ||lam||_1|) / ||lam||_1,
    the operator-norm distance scaled by the common variance budget.
    """
    lam_l1 = float(np.sum(ds.lam))
    mu_min, mu_max = linalg.sym_eigen_extremes(gram(ds))
    return max(abs(mu_max - lam_l1), abs(mu_min - lam_l1)) / lam_l1
