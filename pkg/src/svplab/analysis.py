"""Post-processing: threshold curves, contours, transition widths, and the
small statistical utilities they need.

All logarithms are natural. Summary inputs are duck-typed: anything with
`n`, `d`, `tau`, and `rate` attributes works.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidN, InvalidSpec, Unresolvable
from .sampling import dimension_proxies


def theoretical_threshold(n: int) -> float:
    """Phase transition boundary 2 n ln n for the l2 formulation."""
    if not isinstance(n, (int, np.integer)):
        raise InvalidN(f"n must be an integer, got {n!r}")
    if n < 2:
        raise InvalidN(f"n must be at least 2, got {n}")
    return 2.0 * n * math.log(n)


def tau(n: int, d: float) -> float:
    """Dimension rescaled by the boundary: d / (2 n ln n)."""
    return d / theoretical_threshold(n)


@dataclass(frozen=True)
class ThresholdCurve:
    """The boundary d = 2 n ln n tabulated over a range of sample counts."""

    n_values: tuple[int, ...]

    def d_of(self, n: int) -> float:
        return theoretical_threshold(n)

    def points(self) -> list[tuple[int, float]]:
        return [(n, theoretical_threshold(n)) for n in self.n_values]


def _cells_for_n(summaries, n: int) -> list:
    cells = sorted((s for s in summaries if s.n == n), key=lambda s: s.d)
    seen = set()
    for s in cells:
        if s.d in seen:
            raise InvalidSpec(
                f"duplicate cell at n={n}, d={s.d}; filter summaries to one distribution/norm"
            )
        seen.add(s.d)
    return cells


def quantile_contour(summaries, q: float) -> dict[int, int]:
    """For each n, the smallest grid d whose rate reaches q (first crossing).

    Entries are absent for n whose rates never reach q.
    """
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must be in (0, 1), got {q}")
    out: dict[int, int] = {}
    for n in sorted({s.n for s in summaries}):
        for s in _cells_for_n(summaries, n):
            if s.rate >= q:
                out[n] = s.d
                break
    return out


@dataclass(frozen=True)
class WidthEstimate:
    """Scaled transition width at level q for one sample count."""

    n: int
    q: float
    tau_low: float
    tau_high: float
    w_hat: float


def _first_crossing_tau(cells, level: float) -> float:
    """Tau of the first grid crossing of `level`, linearly interpolated."""
    previous = None
    for s in cells:
        if s.rate >= level:
            if previous is None or s.rate == previous.rate:
                return s.tau
            frac = (level - previous.rate) / (s.rate - previous.rate)
            return previous.tau + frac * (s.tau - previous.tau)
        previous = s
    raise Unresolvable(f"rate grid never reaches level {level}")


def transition_width(summaries, n: int, q: float) -> WidthEstimate:
    """Scaled q-transition width: the tau gap between the q and 1-q
    crossings, divided by the matching normal quantile gap, times sqrt(ln n).
    """
    if not 0.0 < q < 0.5:
        raise DomainError(f"q must be in (0, 0.5), got {q}")
    cells = _cells_for_n(summaries, n)
    if not cells:
        raise Unresolvable(f"no cells for n={n}")
    tau_low = _first_crossing_tau(cells, q)
    tau_high = _first_crossing_tau(cells, 1.0 - q)
    spread = normal_quantile(1.0 - q) - normal_quantile(q)
    w_hat = (tau_high - tau_low) / spread * math.sqrt(math.log(n))
    return WidthEstimate(n=n, q=q, tau_low=tau_low, tau_high=tau_high, w_hat=w_hat)


_ACKLAM_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_ACKLAM_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_ACKLAM_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_ACKLAM_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)


def normal_cdf(x: float) -> float:
    """Standard normal distribution function via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_quantile(p: float) -> float:
    """Inverse standard normal distribution function.

    Rational initial guess refined by one Halley step against an erf-based
    distribution function; absolute error is far below the 1e-8 contract.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must be in (0, 1), got {p}")
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    p_low = 0.02425
    if p < p_low:
        u = math.sqrt(-2.0 * math.log(p))
        x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) / (
            (((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0
        )
    elif p <= 1.0 - p_low:
        u = p - 0.5
        r = u * u
        x = (
            (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5])
            * u
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
        )
    else:
        u = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) / (
            (((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0
        )
    err = normal_cdf(x) - p
    step = err * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - step / (1.0 + x * step / 2.0)


def mills_bounds(t: float) -> tuple[float, float]:
    """Two-sided Gaussian tail bounds (1/t - 1/t^3) phi(t) and phi(t) / t.

    The lower bound is only informative for t >= 1; it goes negative below
    t = 1 and is returned as-is.
    """
    if t <= 0.0:
        raise DomainError(f"t must be positive, got {t}")
    phi = math.exp(-t * t / 2.0) / math.sqrt(2.0 * math.pi)
    return (1.0 / t - 1.0 / t**3) * phi, phi / t


@dataclass(frozen=True)
class RegimeConstants:
    """User-supplied positive constants for the no-proliferation regime check."""

    c1: float
    c2: float
    c3: float
    c4: float

    def __post_init__(self):
        if min(self.c1, self.c2, self.c3, self.c4) <= 0.0:
            raise DomainError("all regime constants must be positive")


@dataclass(frozen=True)
class RegimeCheck:
    sample_size_ok: bool
    effective_dim_ok: bool
    heavy_dim_ok: bool
    anticoncentration_ok: bool
    d2: float
    d_inf: float

    @property
    def conditions(self) -> tuple[bool, bool, bool, bool]:
        return (
            self.sample_size_ok,
            self.effective_dim_ok,
            self.heavy_dim_ok,
            self.anticoncentration_ok,
        )


def check_regime_conditions(
    n: int, lam: np.ndarray, delta: float, constants: RegimeConstants
) -> RegimeCheck:
    """Evaluate the four sufficient conditions of the no-proliferation regime.

    With proxies (d2, d_inf) of `lam` and natural logs throughout:
    n >= c1 ln(1/delta)^2; d2 <= c2 n ln n; d_inf >= c3 n ln(1/delta);
    d_inf^2 >= c4 d2 n. Diagnostic only; the constants carry no defaults
    because none are canonical.
    """
    if not 0.0 < delta < 0.5:
        raise DomainError(f"delta must be in (0, 0.5), got {delta}")
    d2, d_inf = dimension_proxies(lam)
    log_inv_delta = math.log(1.0 / delta)
    return RegimeCheck(
        sample_size_ok=n >= constants.c1 * log_inv_delta**2,
        effective_dim_ok=d2 <= constants.c2 * n * math.log(n),
        heavy_dim_ok=d_inf >= constants.c3 * n * log_inv_delta,
        anticoncentration_ok=d_inf**2 >= constants.c4 * d2 * n,
        d2=d2,
        d_inf=d_inf,
    )


def facet_bound_log(n: int, d: int) -> float:
    """Natural log of binomial(d, n) / 2^n."""
    if n < 1 or d < n:
        raise DomainError(f"need d >= n >= 1, got n={n}, d={d}")
    return (
        math.lgamma(d + 1)
        - math.lgamma(n + 1)
        - math.lgamma(d - n + 1)
        - n * math.log(2.0)
    )


def facet_bound(n: int, d: int, clamp: bool = True) -> float:
    """Probability-style facet count bound binomial(d, n) / 2^n.

    Evaluated in log space; values above one are reported as 1.0 unless
    `clamp` is False, in which case the raw (possibly huge) value returns.
    """
    log_value = facet_bound_log(n, d)
    if clamp and log_value > 0.0:
        return 1.0
    if log_value > 700.0:
        return math.inf
    return math.exp(log_value)


def write_width_csv(estimates: list[WidthEstimate], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "q", "tau_low", "tau_high", "w_hat"])
        for w in estimates:
            writer.writerow([w.n, repr(w.q), repr(w.tau_low), repr(w.tau_high), repr(w.w_hat)])


def write_contour_csv(contour: dict[int, int], q: float, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "q", "d_contour"])
        for n in sorted(contour):
            writer.writerow([n, repr(q), contour[n]])


def write_thresholds_csv(n_values, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "d_theoretical"])
        for n in n_values:
            writer.writerow([int(n), repr(theoretical_threshold(int(n)))])
