"""Dataset generation for the distribution suite, with deterministic seeding.

Feature matrices are built as X = Z diag(lam)^(1/2) where Z has i.i.d. entries
from one of six scalar distributions and lam holds per-coordinate variance
scales. Labels are either fixed balanced or derived from a linear separator.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidSpec

_UNIT_TOL = 1e-9


class DistributionKind(Enum):
    """Scalar entry distributions with their (mean, variance)."""

    UNIFORM = ("uniform", 0.0, 1.0 / 3.0)
    BERNOULLI = ("bernoulli", 0.5, 0.25)
    RADEMACHER = ("rademacher", 0.0, 1.0)
    LAPLACIAN = ("laplacian", 0.0, 2.0)
    GAUSSIAN = ("gaussian", 0.0, 1.0)
    GAUSSIAN_BIASED = ("gaussian_biased", 1.0, 1.0)

    def __init__(self, label: str, mean: float, variance: float):
        self.label = label
        self.mean = mean
        self.variance = variance

    @classmethod
    def from_label(cls, label: str) -> "DistributionKind":
        for kind in cls:
            if kind.label == label:
                return kind
        raise InvalidSpec(f"unknown distribution {label!r}")


@dataclass(frozen=True)
class BalancedLabels:
    """Fixed labels: +1 for the first floor(n/2) samples, -1 for the rest."""


@dataclass(frozen=True, eq=False)
class SeparatorLabels:
    """Labels y_i = sign(v . x_i) for a fixed unit vector v; sign(0) -> +1."""

    v: np.ndarray


LabelMode = BalancedLabels | SeparatorLabels


@dataclass(frozen=True, eq=False)
class SampleSpec:
    n: int
    d: int
    distribution: DistributionKind
    lam: np.ndarray
    labels: LabelMode = field(default_factory=BalancedLabels)
    seed: int = 0

    def validate(self) -> None:
        if self.n < 1 or self.d < 1:
            raise InvalidSpec(f"need n >= 1 and d >= 1, got n={self.n}, d={self.d}")
        lam = np.asarray(self.lam, dtype=float)
        if lam.shape != (self.d,):
            raise InvalidSpec(f"lam must have length d={self.d}, got shape {lam.shape}")
        if np.any(lam < 0):
            raise InvalidSpec("lam entries must be nonnegative")
        if not np.any(lam > 0):
            raise InvalidSpec("lam must have at least one positive entry")
        if isinstance(self.labels, SeparatorLabels):
            v = np.asarray(self.labels.v, dtype=float)
            if v.shape != (self.d,):
                raise InvalidSpec(f"separator must have length d={self.d}")
            if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
                raise InvalidSpec("separator vector must be unit norm within 1e-9")


@dataclass(frozen=True, eq=False)
class Dataset:
    """A drawn sample: features X (n x d), labels y in {+1,-1}^n, scales lam."""

    X: np.ndarray
    y: np.ndarray
    lam: np.ndarray
    spec_hash: str

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


def derive_seed(master_seed: int, *parts: int | str) -> int:
    """Collapse a master seed plus identifying parts into a 64-bit seed.

    Stable across processes and platforms, so trial seeds do not depend on
    execution order or worker count.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(int(master_seed).to_bytes(8, "little", signed=False))
    for part in parts:
        if isinstance(part, int):
            h.update(b"i")
            h.update(part.to_bytes(8, "little", signed=True))
        else:
            data = str(part).encode("utf-8")
            h.update(b"s")
            h.update(len(data).to_bytes(4, "little"))
            h.update(data)
    return int.from_bytes(h.digest(), "little")


def _spec_digest(spec: SampleSpec) -> str:
    lam = np.asarray(spec.lam, dtype=float)
    h = hashlib.blake2b(digest_size=16)
    h.update(spec.distribution.label.encode())
    h.update(np.array([spec.n, spec.d], dtype=np.int64).tobytes())
    h.update((int(spec.seed) & (2**64 - 1)).to_bytes(8, "little"))
    h.update(lam.tobytes())
    if isinstance(spec.labels, SeparatorLabels):
        h.update(b"separator")
        h.update(np.asarray(spec.labels.v, dtype=float).tobytes())
    else:
        h.update(b"balanced")
    return h.hexdigest()


def _draw_entries(kind: DistributionKind, n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    if kind is DistributionKind.UNIFORM:
        return rng.uniform(-1.0, 1.0, size=(n, d))
    if kind is DistributionKind.BERNOULLI:
        return rng.integers(0, 2, size=(n, d)).astype(float)
    if kind is DistributionKind.RADEMACHER:
        return 2.0 * rng.integers(0, 2, size=(n, d)).astype(float) - 1.0
    if kind is DistributionKind.LAPLACIAN:
        return rng.laplace(0.0, 1.0, size=(n, d))
    if kind is DistributionKind.GAUSSIAN:
        return rng.standard_normal(size=(n, d))
    if kind is DistributionKind.GAUSSIAN_BIASED:
        return 1.0 + rng.standard_normal(size=(n, d))
    raise InvalidSpec(f"unhandled distribution {kind}")


def balanced_labels(n: int) -> np.ndarray:
    y = np.full(n, -1.0)
    y[: n // 2] = 1.0
    return y


def draw_dataset(spec: SampleSpec) -> Dataset:
    """Draw the dataset described by `spec`; identical specs give identical draws.

    The generator is counter-based (Philox) and keyed by the spec's seed and
    shape, so draws are reproducible regardless of call order.
    """
    spec.validate()
    seed = int(spec.seed) & (2**64 - 1)
    key = np.random.SeedSequence([seed, distribution_tag(spec.distribution), spec.n, spec.d])
    rng = np.random.Generator(np.random.Philox(key))
    z = _draw_entries(spec.distribution, spec.n, spec.d, rng)
    lam = np.asarray(spec.lam, dtype=float)
    x = z * np.sqrt(lam)[None, :]
    if isinstance(spec.labels, SeparatorLabels):
        scores = x @ np.asarray(spec.labels.v, dtype=float)
        y = np.where(scores >= 0.0, 1.0, -1.0)
    else:
        y = balanced_labels(spec.n)
    return Dataset(X=x, y=y, lam=lam, spec_hash=_spec_digest(spec))


def distribution_tag(kind: DistributionKind) -> int:
    """Small stable integer tag for a distribution, used in RNG keying."""
    return list(DistributionKind).index(kind)


def dimension_proxies(lam: np.ndarray) -> tuple[float, float]:
    """Effective-dimension proxies (l1^2/l2^2, l1/linf) of a scale vector.

    Both are invariant to permutation and positive rescaling of `lam`, and
    are sandwiched between 1 and the ambient dimension.
    """
    arr = np.asarray(lam, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidSpec("lam must be a nonempty vector")
    if np.any(arr < 0):
        raise InvalidSpec("lam entries must be nonnegative")
    linf = float(np.max(arr))
    if linf <= 0.0:
        raise InvalidSpec("lam must have at least one positive entry")
    scaled = arr / linf  # scale invariance doubles as underflow protection
    l1 = float(np.sum(scaled))
    l2sq = float(np.sum(scaled * scaled))
    return l1 * l1 / l2sq, l1


def save_dataset_csv(ds: Dataset, path: str) -> None:
    """Write a dataset as CSV: header y,x1,...,xd; one row per sample."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["y"] + [f"x{j + 1}" for j in range(ds.d)])
        for i in range(ds.n):
            writer.writerow([int(ds.y[i])] + [repr(float(v)) for v in ds.X[i]])


def load_dataset_csv(path: str) -> Dataset:
    """Read a dataset written by `save_dataset_csv`.

    The scale vector is not stored in the file; it is reset to all-ones,
    which leaves every detector unaffected (they only read X and y).
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidSpec(f"{path}: empty file") from None
        if not header or header[0] != "y":
            raise InvalidSpec(f"{path}: line 1: header must start with 'y'")
        d = len(header) - 1
        if d < 1:
            raise InvalidSpec(f"{path}: line 1: no feature columns")
        rows = []
        labels = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d + 1:
                raise InvalidSpec(f"{path}: line {lineno}: expected {d + 1} fields, got {len(row)}")
            try:
                label = float(row[0])
                values = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise InvalidSpec(f"{path}: line {lineno}: {exc}") from None
            if label not in (1.0, -1.0):
                raise InvalidSpec(f"{path}: line {lineno}: label must be +1 or -1")
            labels.append(label)
            rows.append(values)
    if not rows:
        raise InvalidSpec(f"{path}: no data rows")
    x = np.array(rows, dtype=float)
    y = np.array(labels, dtype=float)
    digest = hashlib.blake2b(x.tobytes() + y.tobytes(), digest_size=16).hexdigest()
    return Dataset(X=x, y=y, lam=np.ones(x.shape[1]), spec_hash=digest)
