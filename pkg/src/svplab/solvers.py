"""Optimization oracles independent of the closed-form detector.

A projected cyclic coordinate ascent solves the hard-margin dual quadratic
program over the nonnegative orthant; a dense simplex with Bland's rule
solves the box-dual linear program used for the l1 formulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .detection import SvpVerdict, signed_rows
from .errors import Diverged, ZeroDiagonal
from .sampling import Dataset

QP_DEFAULT_TOL = 1e-9
QP_DEFAULT_MAX_SWEEPS = 100_000
LP_PIVOT_TOL = 1e-10
LP_DEGENERACY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class QpSolution:
    """Hard-margin dual solution: multipliers, separator, and support set."""

    alpha: np.ndarray
    weight: np.ndarray
    objective: float
    iterations: int
    converged: bool
    support_set: np.ndarray


class LpStatus(Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"
    DEGENERATE = "degenerate"


@dataclass(frozen=True, eq=False)
class LpSolution:
    """Vertex solution of max 1.a subject to the unit box on A^T a.

    `active_set` indexes the binding rows among the 2d constraints: j < d
    means column j binds at +1, j >= d means column j-d binds at -1.
    """

    alpha: np.ndarray
    objective: float
    active_set: np.ndarray
    status: LpStatus
    detail: str = field(default="")


def solve_hard_margin_qp(
    ds: Dataset,
    tol: float = QP_DEFAULT_TOL,
    max_iter: int = QP_DEFAULT_MAX_SWEEPS,
) -> QpSolution:
    """Maximize 1.a - a.Qa/2 over a >= 0 by cyclic coordinate ascent.

    Each coordinate step is the exact box-constrained maximizer, so the
    objective never decreases; iteration stops once every coordinate-wise
    KKT violation is at most `tol` (the violations are in margin units).
    Raises Diverged when the iterates settle on a recession ray, which
    certifies that the data admit no separating hyperplane.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    a = signed_rows(ds)
    n = ds.n
    q = a @ a.T
    diag = np.diag(q).copy()
    if np.any(diag <= 0.0):
        bad = int(np.argmin(diag))
        raise ZeroDiagonal(f"sample {bad} is the zero vector; its constraint cannot be met")
    alpha = np.zeros(n)
    grad = np.zeros(n)  # holds Q @ alpha
    ray_tol = 1e-10 * max(1.0, float(np.max(np.abs(a))))
    sweeps = 0
    converged = False
    for sweeps in range(1, max_iter + 1):
        delta = np.zeros(n)
        for i in range(n):
            step = (1.0 - grad[i]) / diag[i]
            new_value = max(0.0, alpha[i] + step)
            change = new_value - alpha[i]
            if change != 0.0:
                alpha[i] = new_value
                grad += change * q[:, i]
                delta[i] += change
        violation = np.where(alpha > 0.0, np.abs(1.0 - grad), np.maximum(0.0, 1.0 - grad))
        if float(np.max(violation)) <= tol:
            converged = True
            break
        moved = float(np.sum(np.abs(delta)))
        if moved > 0.0 and float(np.sum(delta)) >= (1.0 - 1e-9) * moved:
            if float(np.max(np.abs(a.T @ delta))) <= ray_tol * moved:
                raise Diverged(
                    "objective is unbounded along a nonnegative ray; data not separable"
                )
    weight = a.T @ alpha
    objective = float(np.sum(alpha) - 0.5 * (alpha @ grad))
    scale = float(np.max(alpha, initial=0.0))
    # Support membership must be decided well above the solver's own error
    # (which is of order tol), or exact-boundary multipliers get misread.
    support_cut = min(1e3 * tol, 1e-3)
    support = np.flatnonzero(alpha > support_cut * scale) if scale > 0.0 else np.empty(0, dtype=int)
    return QpSolution(
        alpha=alpha,
        weight=weight,
        objective=objective,
        iterations=sweeps,
        converged=converged,
        support_set=support,
    )


def _simplex_box_dual(a: np.ndarray) -> tuple[np.ndarray, float, LpStatus, str]:
    """Tableau simplex for max 1.x over -1 <= a^T x <= 1, Bland's rule.

    The free vector x is split into positive/negative parts and the 2d box
    rows get unit slacks, so the all-slack basis is immediately feasible.
    Returns (x, objective, status, detail).
    """
    n, d = a.shape
    rows = 2 * d
    cols = 2 * n + rows
    scale = max(1.0, float(np.max(np.abs(a))))
    eps_cost = LP_PIVOT_TOL * scale
    eps_pivot = LP_PIVOT_TOL * scale

    body = np.empty((rows, cols + 1))
    body[:d, :n] = a.T
    body[:d, n : 2 * n] = -a.T
    body[d:, :n] = -a.T
    body[d:, n : 2 * n] = a.T
    body[:, 2 * n :] = 0.0
    body[:, 2 * n : cols][np.arange(rows), np.arange(rows)] = 1.0
    body[:, cols] = 1.0

    cost = np.zeros(cols + 1)
    cost[:n] = 1.0
    cost[n : 2 * n] = -1.0
    obj_row = cost.copy()  # reduced costs; last entry is -objective
    basis = np.arange(2 * n, 2 * n + rows)

    max_pivots = 200 * (rows + n) + 1000
    for _ in range(max_pivots):
        improving = np.flatnonzero(obj_row[:cols] > eps_cost)
        if improving.size == 0:
            status = LpStatus.OPTIMAL
            detail = ""
            break
        enter = int(improving[0])  # Bland: lowest eligible index
        col = body[:, enter]
        eligible = np.flatnonzero(col > eps_pivot)
        if eligible.size == 0:
            x = _solution_from_basis(basis, body[:, cols], n)
            return x, math.inf, LpStatus.UNBOUNDED, "improving direction has no binding row"
        ratios = body[eligible, cols] / col[eligible]
        best = ratios.min()
        # tie window relative to the ratio scale, not the matrix scale
        ties = eligible[ratios <= best + 1e-12 + 1e-9 * abs(best)]
        leave = int(ties[np.argmin(basis[ties])])  # Bland tie-break
        pivot = body[leave, enter]
        body[leave, :] /= pivot
        pivot_row = body[leave, :]
        factors = body[:, enter].copy()
        factors[leave] = 0.0
        body -= np.outer(factors, pivot_row)
        obj_row -= obj_row[enter] * pivot_row
        basis[leave] = enter
    else:
        x = _solution_from_basis(basis, body[:, cols], n)
        return x, float(-obj_row[cols]), LpStatus.DEGENERATE, "pivot budget exhausted"

    x = _solution_from_basis(basis, body[:, cols], n)
    objective = float(-obj_row[cols])
    # A nonbasic column with zero reduced cost signals a non-unique optimum,
    # except the sign twin of a basic split variable, which re-encodes the
    # same point.
    basic = set(int(b) for b in basis)
    for j in range(cols):
        if j in basic or obj_row[j] > LP_DEGENERACY_TOL * scale:
            continue
        if abs(obj_row[j]) <= LP_DEGENERACY_TOL * scale:
            twin = j + n if j < n else (j - n if j < 2 * n else None)
            if twin is not None and twin in basic:
                continue
            return x, objective, LpStatus.DEGENERATE, f"zero reduced cost on column {j}"
    return x, objective, LpStatus.OPTIMAL, ""


def _solution_from_basis(basis: np.ndarray, rhs: np.ndarray, n: int) -> np.ndarray:
    x = np.zeros(n)
    for row, var in enumerate(basis):
        var = int(var)
        if var < n:
            x[var] += rhs[row]
        elif var < 2 * n:
            x[var - n] -= rhs[row]
    return x


def solve_l1_dual_lp(ds: Dataset) -> LpSolution:
    """Maximize the coefficient sum subject to the unit box on A^T alpha."""
    a = signed_rows(ds)
    alpha, objective, status, detail = _simplex_box_dual(a)
    if status is LpStatus.UNBOUNDED:
        return LpSolution(
            alpha=alpha,
            objective=objective,
            active_set=np.empty(0, dtype=int),
            status=status,
            detail=detail,
        )
    constraint_values = a.T @ alpha
    atol = 1e-8 * max(1.0, float(np.max(np.abs(constraint_values), initial=0.0)))
    upper = np.flatnonzero(np.abs(constraint_values - 1.0) <= atol)
    lower = np.flatnonzero(np.abs(constraint_values + 1.0) <= atol) + ds.d
    active = np.concatenate([upper, lower])
    return LpSolution(
        alpha=alpha,
        objective=objective,
        active_set=active,
        status=status,
        detail=detail,
    )


def detect_svp_l1(ds: Dataset, tol: float = QP_DEFAULT_TOL) -> SvpVerdict:
    """SVP check for the l1 formulation: the box-dual optimum must be
    componentwise positive at a unique vertex.

    Non-optimal statuses (unbounded polytope, tied optima, numerical
    trouble) are folded into the degenerate flag rather than raised.
    """
    solution = solve_l1_dual_lp(ds)
    degenerate = solution.status is not LpStatus.OPTIMAL
    if degenerate:
        svp = False
    else:
        scale = float(np.max(np.abs(solution.alpha), initial=0.0))
        svp = scale > 0.0 and bool(np.all(solution.alpha > tol * scale))
    return SvpVerdict(
        svp=svp,
        alpha_direction=solution.alpha,
        loo_stats=np.empty(0),
        min_margin_slack=float("nan"),
        degenerate=degenerate,
        tolerance_used=tol,
    )
