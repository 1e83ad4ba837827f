"""Estimator-style front ends so the solvers compose with sklearn pipelines."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from . import detection, solvers
from .errors import SvpLabError
from .validation import check_features, dataset_from_arrays


class NotFitted(SvpLabError):
    """fit() has not been called yet."""


class HardMarginSVM(BaseEstimator):
    """Hard-margin linear SVM through the origin, fit via its dual.

    No intercept: the separator passes through the origin by construction.
    After `fit`, `coef_` holds the weight vector, `dual_coef_` the
    nonnegative multipliers, and `support_` the indices of support vectors.

    Raises Diverged when the training data are not linearly separable.
    """

    def __init__(self, tol: float = solvers.QP_DEFAULT_TOL, max_iter: int = solvers.QP_DEFAULT_MAX_SWEEPS):
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        ds = dataset_from_arrays(X, y)
        solution = solvers.solve_hard_margin_qp(ds, tol=self.tol, max_iter=self.max_iter)
        self.coef_ = solution.weight
        self.dual_coef_ = solution.alpha
        self.support_ = solution.support_set
        self.n_iter_ = solution.iterations
        self.converged_ = solution.converged
        self.objective_ = solution.objective
        self.n_features_in_ = ds.d
        return self

    def decision_function(self, X) -> np.ndarray:
        if not hasattr(self, "coef_"):
            raise NotFitted("call fit before decision_function")
        features = check_features(X)
        return features @ self.coef_

    def predict(self, X) -> np.ndarray:
        scores = self.decision_function(X)
        return np.where(scores >= 0.0, 1.0, -1.0)


class SvpDetector(BaseEstimator):
    """Detects whether every training sample is a support vector.

    `norm` selects the formulation: "l2" uses the closed-form dual-sign
    criterion, "l1" the box-dual linear program. After `fit`, the verdict is
    in `svp_` with supporting statistics alongside.
    """

    def __init__(self, norm: str = "l2", tol: float = detection.DEFAULT_TOL):
        self.norm = norm
        self.tol = tol

    def fit(self, X, y):
        if self.norm not in ("l2", "l1"):
            raise ValueError(f"norm must be 'l2' or 'l1', got {self.norm!r}")
        ds = dataset_from_arrays(X, y)
        if self.norm == "l2":
            verdict = detection.detect_svp_l2(ds, tol=self.tol)
        else:
            verdict = solvers.detect_svp_l1(ds, tol=self.tol)
        self.svp_ = verdict.svp
        self.alpha_direction_ = verdict.alpha_direction
        self.loo_stats_ = verdict.loo_stats
        self.min_margin_slack_ = verdict.min_margin_slack
        self.degenerate_ = verdict.degenerate
        self.verdict_ = verdict
        self.n_features_in_ = ds.d
        return self
