"""Monte Carlo harness over (distribution, n, d) grids.

Every trial is a pure function of (config, cell, trial index): its dataset
seed is a stable hash of those coordinates, so summaries are bit-identical
for any worker count or scheduling order.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from multiprocessing import Pool

from .detection import detect_svp_l2
from .errors import InvalidCounts, InvalidSpec
from .sampling import DistributionKind, SampleSpec, derive_seed, draw_dataset
from .solvers import detect_svp_l1

import numpy as np

DEFAULT_Z = 1.959963984540054  # two-sided 95%


@dataclass(frozen=True)
class IsotropicPattern:
    def resolve(self, d: int) -> np.ndarray:
        return np.ones(d)


@dataclass(frozen=True)
class SpikePattern:
    """`count` coordinates at variance `scale`, the rest at one."""

    count: int
    scale: float

    def resolve(self, d: int) -> np.ndarray:
        if not 1 <= self.count <= d:
            raise InvalidSpec(f"spike count {self.count} outside [1, {d}]")
        lam = np.ones(d)
        lam[: self.count] = self.scale
        return lam


@dataclass(frozen=True, eq=False)
class ExplicitPattern:
    values: np.ndarray

    def resolve(self, d: int) -> np.ndarray:
        lam = np.asarray(self.values, dtype=float)
        if lam.shape != (d,):
            raise InvalidSpec(f"explicit lam has length {lam.shape[0]}, cell needs {d}")
        return lam


LambdaPattern = IsotropicPattern | SpikePattern | ExplicitPattern


@dataclass(frozen=True)
class GridCell:
    distribution: DistributionKind
    n: int
    d: int


@dataclass(frozen=True, eq=False)
class GridConfig:
    """Full experiment description; see `from_dict` for the JSON schema."""

    distributions: tuple[DistributionKind, ...]
    n_values: tuple[int, ...]
    d_values: tuple[int, ...] | None = None
    tau_values: tuple[float, ...] | None = None
    trials: int = 400
    master_seed: int = 0
    norm: str = "l2"
    lambda_pattern: LambdaPattern = field(default_factory=IsotropicPattern)
    tolerance: float = 1e-9
    workers: int = 1

    def validate(self) -> None:
        if not self.distributions or not self.n_values:
            raise InvalidSpec("distributions and n_values must be non-empty")
        if (self.d_values is None) == (self.tau_values is None):
            raise InvalidSpec("exactly one of d_values / tau_values must be given")
        if self.d_values is not None and (not self.d_values or min(self.d_values) < 1):
            raise InvalidSpec("d_values must be non-empty positive integers")
        if self.tau_values is not None and (not self.tau_values or min(self.tau_values) <= 0):
            raise InvalidSpec("tau_values must be non-empty and positive")
        if self.trials < 1:
            raise InvalidSpec("trials must be at least 1")
        if self.norm not in ("l2", "l1"):
            raise InvalidSpec(f"norm must be 'l2' or 'l1', got {self.norm!r}")

    def cells(self) -> list[GridCell]:
        """Grid cells in canonical (distribution, n, d) order."""
        self.validate()
        out = []
        for dist in self.distributions:
            for n in self.n_values:
                if self.d_values is not None:
                    ds = self.d_values
                else:
                    ds = tuple(resolve_tau_dimension(n, tau) for tau in self.tau_values)
                for d in ds:
                    out.append(GridCell(dist, n, d))
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "GridConfig":
        try:
            distributions = tuple(
                DistributionKind.from_label(label) for label in raw["distributions"]
            )
            pattern = _pattern_from_dict(raw.get("lambda_pattern", {"kind": "isotropic"}))
            cfg = cls(
                distributions=distributions,
                n_values=tuple(int(v) for v in raw["n_values"]),
                d_values=tuple(int(v) for v in raw["d_values"]) if "d_values" in raw else None,
                tau_values=tuple(float(v) for v in raw["tau_values"])
                if "tau_values" in raw
                else None,
                trials=int(raw.get("trials", 400)),
                master_seed=int(raw.get("master_seed", 0)),
                norm=str(raw.get("norm", "l2")),
                lambda_pattern=pattern,
                tolerance=float(raw.get("tolerance", 1e-9)),
                workers=int(raw.get("workers", 1)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"bad grid config: {exc}") from None
        cfg.validate()
        return cfg

    @classmethod
    def from_json_file(cls, path: str) -> "GridConfig":
        with open(path) as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidSpec(f"{path}: {exc}") from None
        return cls.from_dict(raw)


def _pattern_from_dict(raw: dict) -> LambdaPattern:
    kind = raw.get("kind", "isotropic")
    if kind == "isotropic":
        return IsotropicPattern()
    if kind == "spike":
        return SpikePattern(count=int(raw["count"]), scale=float(raw["scale"]))
    if kind == "explicit":
        return ExplicitPattern(values=np.asarray(raw["values"], dtype=float))
    raise InvalidSpec(f"unknown lambda pattern kind {kind!r}")


def resolve_tau_dimension(n: int, tau: float) -> int:
    """Dimension d = round(tau * 2 n ln n), floored at 1."""
    if n < 2:
        raise InvalidSpec("tau grids need n >= 2")
    return max(1, round(tau * 2.0 * n * math.log(n)))


def cell_tau(n: int, d: int) -> float:
    return d / (2.0 * n * math.log(n)) if n >= 2 else float("nan")


@dataclass(frozen=True)
class TrialRecord:
    distribution: DistributionKind
    norm: str
    n: int
    d: int
    trial_index: int
    svp: bool
    degenerate: bool
    min_margin_slack: float
    wall_time: float


@dataclass(frozen=True)
class CellSummary:
    distribution: DistributionKind
    norm: str
    n: int
    d: int
    tau: float
    trials: int
    svp_count: int
    degenerate_count: int
    rate: float
    ci_low: float
    ci_high: float
    master_seed: int


def run_trial(cell: GridCell, trial_index: int, cfg: GridConfig) -> TrialRecord:
    """Run one Monte Carlo trial; deterministic in (cfg, cell, trial_index).

    The dataset seed hashes (master_seed, distribution, n, d, trial_index)
    but not the norm, so l1 and l2 runs that share a master seed see
    identical datasets. All failure modes land in the degenerate flag.
    """
    seed = derive_seed(
        cfg.master_seed, cell.distribution.label, cell.n, cell.d, int(trial_index)
    )
    spec = SampleSpec(
        n=cell.n,
        d=cell.d,
        distribution=cell.distribution,
        lam=cfg.lambda_pattern.resolve(cell.d),
        seed=seed,
    )
    started = time.perf_counter()
    ds = draw_dataset(spec)
    if cfg.norm == "l2":
        verdict = detect_svp_l2(ds, tol=cfg.tolerance)
    else:
        verdict = detect_svp_l1(ds, tol=cfg.tolerance)
    elapsed = time.perf_counter() - started
    return TrialRecord(
        distribution=cell.distribution,
        norm=cfg.norm,
        n=cell.n,
        d=cell.d,
        trial_index=trial_index,
        svp=verdict.svp,
        degenerate=verdict.degenerate,
        min_margin_slack=verdict.min_margin_slack,
        wall_time=elapsed,
    )


_WORKER_CFG: GridConfig | None = None


def _worker_init(cfg: GridConfig) -> None:
    global _WORKER_CFG
    _WORKER_CFG = cfg


def _worker_run(item: tuple[int, int, int, int]) -> tuple[int, int, int, int, bool, bool, float, float]:
    dist_idx, n, d, trial = item
    cfg = _WORKER_CFG
    cell = GridCell(cfg.distributions[dist_idx], n, d)
    rec = run_trial(cell, trial, cfg)
    return dist_idx, n, d, trial, rec.svp, rec.degenerate, rec.min_margin_slack, rec.wall_time


def summarize_cell(
    cell: GridCell, cfg: GridConfig, svp_count: int, degenerate_count: int
) -> CellSummary:
    """Aggregate counts into a summary; degenerate trials count as non-SVP."""
    rate = svp_count / cfg.trials
    lo, hi = wilson_interval(svp_count, cfg.trials, DEFAULT_Z)
    return CellSummary(
        distribution=cell.distribution,
        norm=cfg.norm,
        n=cell.n,
        d=cell.d,
        tau=cell_tau(cell.n, cell.d),
        trials=cfg.trials,
        svp_count=svp_count,
        degenerate_count=degenerate_count,
        rate=rate,
        ci_low=lo,
        ci_high=hi,
        master_seed=cfg.master_seed,
    )


def run_grid_records(
    cfg: GridConfig, progress=None, workers: int | None = None
) -> tuple[list[CellSummary], list[TrialRecord]]:
    """Run every cell x trial; returns summaries and per-trial records.

    `progress`, when given, is called with each finished CellSummary.
    Aggregation is commutative integer counting, so the output does not
    depend on scheduling; records are sorted into canonical order.
    """
    cfg.validate()
    cells = cfg.cells()
    worker_count = cfg.workers if workers is None else workers
    items = [
        (list(cfg.distributions).index(cell.distribution), cell.n, cell.d, trial)
        for cell in cells
        for trial in range(cfg.trials)
    ]
    results = []
    if worker_count <= 1:
        _worker_init(cfg)
        results = [_worker_run(item) for item in items]
    else:
        chunk = max(1, len(items) // (worker_count * 8))
        with Pool(worker_count, initializer=_worker_init, initargs=(cfg,)) as pool:
            results = list(pool.imap_unordered(_worker_run, items, chunksize=chunk))

    by_cell: dict[tuple[int, int, int], list] = {}
    for dist_idx, n, d, trial, svp, degenerate, slack, wall in results:
        by_cell.setdefault((dist_idx, n, d), []).append(
            (trial, svp, degenerate, slack, wall)
        )
    summaries = []
    records = []
    for cell in cells:
        key = (list(cfg.distributions).index(cell.distribution), cell.n, cell.d)
        rows = sorted(by_cell[key])
        svp_count = sum(1 for r in rows if r[1])
        degenerate_count = sum(1 for r in rows if r[2])
        summary = summarize_cell(cell, cfg, svp_count, degenerate_count)
        summaries.append(summary)
        if progress is not None:
            progress(summary)
        for trial, svp, degenerate, slack, wall in rows:
            records.append(
                TrialRecord(
                    distribution=cell.distribution,
                    norm=cfg.norm,
                    n=cell.n,
                    d=cell.d,
                    trial_index=trial,
                    svp=svp,
                    degenerate=degenerate,
                    min_margin_slack=slack,
                    wall_time=wall,
                )
            )
    return summaries, records


def run_grid(cfg: GridConfig, progress=None, workers: int | None = None) -> list[CellSummary]:
    """Run the grid and return per-cell summaries in (distribution, n, d) order."""
    summaries, _ = run_grid_records(cfg, progress=progress, workers=workers)
    return summaries


def wilson_interval(successes: int, trials: int, z: float = DEFAULT_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion, clamped to [0, 1]."""
    if trials < 1 or not 0 <= successes <= trials:
        raise InvalidCounts(f"bad counts: {successes}/{trials}")
    if z <= 0:
        raise InvalidCounts("z must be positive")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2.0 * trials)) / denom
    margin = (z / denom) * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials))
    return max(0.0, center - margin), min(1.0, center + margin)


SUMMARY_HEADER = [
    "distribution",
    "norm",
    "n",
    "d",
    "tau",
    "trials",
    "svp_count",
    "degenerate_count",
    "rate",
    "ci_low",
    "ci_high",
    "master_seed",
]

TRIAL_HEADER = [
    "distribution",
    "norm",
    "n",
    "d",
    "trial",
    "svp",
    "degenerate",
    "min_margin_slack",
]


def persist_results(
    summaries: list[CellSummary],
    path: str,
    records: list[TrialRecord] | None = None,
    records_path: str | None = None,
) -> None:
    """Write the summary CSV (and, optionally, the per-trial CSV)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_HEADER)
        for s in summaries:
            writer.writerow(
                [
                    s.distribution.label,
                    s.norm,
                    s.n,
                    s.d,
                    repr(s.tau),
                    s.trials,
                    s.svp_count,
                    s.degenerate_count,
                    repr(s.rate),
                    repr(s.ci_low),
                    repr(s.ci_high),
                    s.master_seed,
                ]
            )
    if records_path is not None:
        if records is None:
            raise InvalidSpec("records_path given without records")
        with open(records_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRIAL_HEADER)
            for r in records:
                writer.writerow(
                    [
                        r.distribution.label,
                        r.norm,
                        r.n,
                        r.d,
                        r.trial_index,
                        int(r.svp),
                        int(r.degenerate),
                        repr(r.min_margin_slack),
                    ]
                )


def load_results(path: str) -> list[CellSummary]:
    """Read a summary CSV back; errors name the offending line."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SUMMARY_HEADER:
            raise InvalidSpec(f"{path}: line 1: unexpected header {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(SUMMARY_HEADER):
                raise InvalidSpec(
                    f"{path}: line {lineno}: expected {len(SUMMARY_HEADER)} fields, got {len(row)}"
                )
            try:
                out.append(
                    CellSummary(
                        distribution=DistributionKind.from_label(row[0]),
                        norm=row[1],
                        n=int(row[2]),
                        d=int(row[3]),
                        tau=float(row[4]),
                        trials=int(row[5]),
                        svp_count=int(row[6]),
                        degenerate_count=int(row[7]),
                        rate=float(row[8]),
                        ci_low=float(row[9]),
                        ci_high=float(row[10]),
                        master_seed=int(row[11]),
                    )
                )
            except (ValueError, InvalidSpec) as exc:
                raise InvalidSpec(f"{path}: line {lineno}: {exc}") from None
    return out


def filter_summaries(
    summaries: list[CellSummary],
    distribution: str | None = None,
    norm: str | None = None,
) -> list[CellSummary]:
    """Restrict summaries to one distribution label and/or norm."""
    out = summaries
    if distribution is not None:
        out = [s for s in out if s.distribution.label == distribution]
    if norm is not None:
        out = [s for s in out if s.norm == norm]
    return out
