import numpy as np
import pytest

from svplab.sampling import Dataset


def make_dataset(X, y, lam=None) -> Dataset:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if lam is None:
        lam = np.ones(X.shape[1])
    return Dataset(X=X, y=y, lam=np.asarray(lam, dtype=float), spec_hash="test")


@pytest.fixture
def rng():
    return np.random.default_rng(20210607)
