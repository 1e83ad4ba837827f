"""Input validation helpers shared by the estimator layer and the CLI."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, InvalidSpec
from .sampling import Dataset


def check_features(X) -> np.ndarray:
    """Coerce features to a finite 2-D float array with at least one column."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatch(f"X must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"X must be nonempty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidSpec("X contains non-finite entries")
    return arr


def check_labels(y, n: int) -> np.ndarray:
    """Coerce labels to a length-n float vector over {+1, -1}."""
    arr = np.asarray(y, dtype=float).reshape(-1)
    if arr.shape[0] != n:
        raise DimensionMismatch(f"y has length {arr.shape[0]}, expected {n}")
    if not np.all(np.isin(arr, (1.0, -1.0))):
        raise InvalidSpec("labels must be +1 or -1")
    return arr


def dataset_from_arrays(X, y) -> Dataset:
    """Bundle validated (X, y) as a Dataset with unit scales."""
    features = check_features(X)
    labels = check_labels(y, features.shape[0])
    return Dataset(
        X=features,
        y=labels,
        lam=np.ones(features.shape[1]),
        spec_hash="",
    )
