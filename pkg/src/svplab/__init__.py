"""svplab: detect support vector proliferation and map its phase transition.

Core layers:
  sampling    dataset generation for the six-distribution suite
  detection   exact l2 SVP verdicts, leave-one-out statistics, diagnostics
  solvers     hard-margin dual QP and the l1 box-dual LP oracles
  experiment  deterministic Monte Carlo grids with per-cell summaries
  analysis    threshold curves, contours, transition widths
  heatmap     SVG rendering of rate grids
  estimators  sklearn-style wrappers (imported lazily; needs scikit-learn)
"""

from . import analysis, detection, experiment, heatmap, linalg, sampling, solvers
from .analysis import (
    RegimeConstants,
    ThresholdCurve,
    WidthEstimate,
    check_regime_conditions,
    facet_bound,
    mills_bounds,
    normal_quantile,
    quantile_contour,
    theoretical_threshold,
    transition_width,
)
from .detection import (
    ProjectionResult,
    SvpVerdict,
    detect_svp_l2,
    gram,
    gram_deviation,
    loo_statistics_direct,
    projection_point,
)
from .errors import SvpLabError
from .experiment import (
    CellSummary,
    GridConfig,
    TrialRecord,
    load_results,
    persist_results,
    run_grid,
    run_trial,
    wilson_interval,
)
from .heatmap import HeatmapSpec, render_heatmap_svg
from .sampling import (
    Dataset,
    DistributionKind,
    SampleSpec,
    dimension_proxies,
    draw_dataset,
)
from .solvers import (
    LpSolution,
    QpSolution,
    detect_svp_l1,
    solve_hard_margin_qp,
    solve_l1_dual_lp,
)

__version__ = "0.1.0"

_LAZY = {"HardMarginSVM", "SvpDetector"}


def __getattr__(name):
    # Estimators pull in scikit-learn; defer that import until requested.
    if name in _LAZY:
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = [
    "CellSummary",
    "Dataset",
    "DistributionKind",
    "GridConfig",
    "HardMarginSVM",
    "HeatmapSpec",
    "LpSolution",
    "ProjectionResult",
    "QpSolution",
    "RegimeConstants",
    "SampleSpec",
    "SvpDetector",
    "SvpLabError",
    "SvpVerdict",
    "ThresholdCurve",
    "TrialRecord",
    "WidthEstimate",
    "check_regime_conditions",
    "detect_svp_l1",
    "detect_svp_l2",
    "dimension_proxies",
    "draw_dataset",
    "facet_bound",
    "gram",
    "gram_deviation",
    "load_results",
    "loo_statistics_direct",
    "mills_bounds",
    "normal_quantile",
    "persist_results",
    "projection_point",
    "quantile_contour",
    "render_heatmap_svg",
    "run_grid",
    "run_trial",
    "solve_hard_margin_qp",
    "solve_l1_dual_lp",
    "theoretical_threshold",
    "transition_width",
    "wilson_interval",
]
