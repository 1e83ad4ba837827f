"""Command-line front end: simulate grids, check datasets, analyze, render.

Exit codes are a stable contract:
  0 success (for `check`: SVP holds)
  1 config parse failure
  2 IO or malformed input
  3 `check`: SVP does not hold
  4 `check`: degenerate instance
  5 `analyze`: requested quantile never crossed
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from . import analysis, experiment, heatmap
from .detection import detect_svp_l2
from .errors import EmptySelection, InvalidSpec, SvpLabError, Unresolvable
from .sampling import load_dataset_csv
from .solvers import detect_svp_l1

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_NO_SVP = 3
EXIT_DEGENERATE = 4
EXIT_UNRESOLVABLE = 5


def default_workers() -> int:
    raw = os.environ.get("SVPLAB_WORKERS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _cmd_simulate(args) -> int:
    try:
        cfg = experiment.GridConfig.from_json_file(args.config)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvalidSpec as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, master_seed=args.seed)
    if args.norm is not None:
        cfg = dataclasses.replace(cfg, norm=args.norm)
    if args.tol is not None:
        cfg = dataclasses.replace(cfg, tolerance=args.tol)
    workers = args.workers if args.workers is not None else (cfg.workers or default_workers())

    def progress(summary):
        print(
            f"{summary.distribution.label} n={summary.n} d={summary.d} "
            f"rate={summary.rate:.4f} degenerate={summary.degenerate_count}"
        )

    try:
        summaries, records = experiment.run_grid_records(cfg, progress=progress, workers=workers)
        experiment.persist_results(
            summaries,
            args.out,
            records=records if args.trial_out else None,
            records_path=args.trial_out,
        )
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SvpLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def _cmd_check(args) -> int:
    try:
        ds = load_dataset_csv(args.data)
    except OSError as exc:
        print(f"error: cannot read dataset: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvalidSpec as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.norm == "l2":
        verdict = detect_svp_l2(ds, tol=args.tol)
    else:
        verdict = detect_svp_l1(ds, tol=args.tol)
    if verdict.degenerate:
        print(f"degenerate instance (norm={args.norm}, n={ds.n}, d={ds.d})")
        return EXIT_DEGENERATE
    signs = "".join("+" if a > 0 else "-" for a in verdict.alpha_direction)
    print(f"svp: {'yes' if verdict.svp else 'no'} (norm={args.norm}, n={ds.n}, d={ds.d})")
    print(f"alpha signs: {signs}")
    if verdict.loo_stats.size:
        print("loo stats: " + " ".join(f"{v:.6g}" for v in verdict.loo_stats))
        print(f"min margin slack: {verdict.min_margin_slack:.6g}")
    return EXIT_OK if verdict.svp else EXIT_NO_SVP


def _load_filtered(args):
    summaries = experiment.load_results(args.input)
    return experiment.filter_summaries(summaries, distribution=args.distribution, norm=args.norm)


def _cmd_analyze(args) -> int:
    try:
        summaries = _load_filtered(args)
        if not summaries:
            raise InvalidSpec("no summaries after filtering")
        if args.mode == "thresholds":
            n_values = sorted({s.n for s in summaries})
            analysis.write_thresholds_csv(n_values, args.out)
        elif args.mode == "contours":
            contour = analysis.quantile_contour(summaries, args.q)
            analysis.write_contour_csv(contour, args.q, args.out)
        else:
            estimates = [
                analysis.transition_width(summaries, n, args.q)
                for n in sorted({s.n for s in summaries})
            ]
            analysis.write_width_csv(estimates, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Unresolvable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNRESOLVABLE
    except SvpLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _cmd_heatmap(args) -> int:
    try:
        summaries = _load_filtered(args)
        overlays = []
        if not args.no_threshold_overlay:
            overlays.append(("2n ln n", lambda n: analysis.theoretical_threshold(int(n))))
        spec = heatmap.HeatmapSpec(overlays=tuple(overlays))
        svg = heatmap.render_heatmap_svg(summaries, spec)
        with open(args.out, "w") as fh:
            fh.write(svg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (EmptySelection, SvpLabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="svplab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo grid from a JSON config")
    p_sim.add_argument("--config", required=True, help="JSON grid config path")
    p_sim.add_argument("--out", required=True, help="summary CSV output path")
    p_sim.add_argument("--trial-out", default=None, help="optional per-trial CSV path")
    p_sim.add_argument("--workers", type=int, default=None)
    p_sim.add_argument("--seed", type=int, default=None, help="override master seed")
    p_sim.add_argument("--norm", choices=("l2", "l1"), default=None)
    p_sim.add_argument("--tol", type=float, default=None)
    p_sim.set_defaults(func=_cmd_simulate)

    p_check = sub.add_parser("check", help="check one dataset CSV for SVP")
    p_check.add_argument("--data", required=True, help="dataset CSV (header y,x1,...,xd)")
    p_check.add_argument("--norm", choices=("l2", "l1"), default="l2")
    p_check.add_argument("--tol", type=float, default=1e-9)
    p_check.set_defaults(func=_cmd_check)

    p_an = sub.add_parser("analyze", help="post-process a summary CSV")
    p_an.add_argument("--in", dest="input", required=True, help="summary CSV path")
    p_an.add_argument("--out", required=True, help="analysis CSV output path")
    p_an.add_argument("--mode", choices=("contours", "width", "thresholds"), required=True)
    p_an.add_argument("--q", type=float, default=0.8, help="contour level / width quantile")
    p_an.add_argument("--distribution", default=None, help="filter by distribution label")
    p_an.add_argument("--norm", choices=("l2", "l1"), default=None)
    p_an.set_defaults(func=_cmd_analyze)

    p_map = sub.add_parser("heatmap", help="render a summary CSV as an SVG heatmap")
    p_map.add_argument("--in", dest="input", required=True, help="summary CSV path")
    p_map.add_argument("--out", required=True, help="SVG output path")
    p_map.add_argument("--distribution", default=None, help="filter by distribution label")
    p_map.add_argument("--norm", choices=("l2", "l1"), default=None)
    p_map.add_argument("--no-threshold-overlay", action="store_true")
    p_map.set_defaults(func=_cmd_heatmap)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
