import filecmp
import json
import math

import numpy as np
import pytest

from svplab.errors import InvalidCounts, InvalidSpec
from svplab.experiment import (
    CellSummary,
    ExplicitPattern,
    GridCell,
    GridConfig,
    IsotropicPattern,
    SpikePattern,
    filter_summaries,
    load_results,
    persist_results,
    resolve_tau_dimension,
    run_grid,
    run_grid_records,
    run_trial,
    wilson_interval,
)
from svplab.sampling import DistributionKind


def small_config(**overrides):
    raw = {
        "distributions": ["gaussian"],
        "n_values": [8],
        "d_values": [8, 40],
        "trials": 20,
        "master_seed": 13,
        "norm": "l2",
    }
    raw.update(overrides)
    return GridConfig.from_dict(raw)


class TestWilson:
    def test_zero_successes_clamps_low(self):
        lo, hi = wilson_interval(0, 100, 1.96)
        assert lo == 0.0
        assert 0.0 < hi < 0.05

    def test_all_successes_clamps_high(self):
        lo, hi = wilson_interval(400, 400, 1.96)
        assert hi == 1.0
        assert 0.98 < lo < 1.0

    def test_midpoint_value(self):
        lo, hi = wilson_interval(200, 400, 1.96)
        assert lo == pytest.approx(0.451233, abs=1e-5)
        assert hi == pytest.approx(0.548767, abs=1e-5)
        # spec quotes (0.4514, 0.5486) to within 1e-3
        assert lo == pytest.approx(0.4514, abs=1e-3)
        assert hi == pytest.approx(0.5486, abs=1e-3)

    def test_bad_counts(self):
        with pytest.raises(InvalidCounts):
            wilson_interval(5, 4)
        with pytest.raises(InvalidCounts):
            wilson_interval(-1, 4)
        with pytest.raises(InvalidCounts):
            wilson_interval(0, 0)

    def test_interval_brackets_rate(self):
        for successes in (0, 1, 7, 19, 20):
            lo, hi = wilson_interval(successes, 20)
            assert 0.0 <= lo <= successes / 20 <= hi <= 1.0


class TestGridConfig:
    def test_json_round_trip(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(
            json.dumps(
                {
                    "distributions": ["gaussian", "uniform"],
                    "n_values": [10],
                    "tau_values": [0.5, 1.5],
                    "trials": 3,
                    "master_seed": 5,
                    "norm": "l1",
                    "lambda_pattern": {"kind": "spike", "count": 2, "scale": 9.0},
                    "tolerance": 1e-8,
                    "workers": 2,
                }
            )
        )
        cfg = GridConfig.from_json_file(str(path))
        assert cfg.norm == "l1"
        assert cfg.lambda_pattern == SpikePattern(count=2, scale=9.0)
        cells = cfg.cells()
        assert len(cells) == 4
        assert cells[0].d == resolve_tau_dimension(10, 0.5)

    def test_tau_resolution_uses_natural_log(self):
        assert resolve_tau_dimension(50, 1.0) == round(2 * 50 * math.log(50))

    def test_exactly_one_dimension_axis(self):
        with pytest.raises(InvalidSpec):
            small_config(tau_values=[1.0])
        with pytest.raises(InvalidSpec):
            GridConfig.from_dict({"distributions": ["gaussian"], "n_values": [4], "trials": 1})

    def test_unknown_distribution_rejected(self):
        with pytest.raises(InvalidSpec):
            small_config(distributions=["cauchy"])

    def test_bad_norm_rejected(self):
        with pytest.raises(InvalidSpec):
            small_config(norm="l3")

    def test_lambda_patterns_resolve(self):
        assert np.array_equal(IsotropicPattern().resolve(3), np.ones(3))
        np.testing.assert_array_equal(SpikePattern(2, 4.0).resolve(4), [4.0, 4.0, 1.0, 1.0])
        np.testing.assert_array_equal(ExplicitPattern(np.array([1.0, 2.0])).resolve(2), [1.0, 2.0])
        with pytest.raises(InvalidSpec):
            ExplicitPattern(np.array([1.0, 2.0])).resolve(3)
        with pytest.raises(InvalidSpec):
            SpikePattern(5, 2.0).resolve(3)


class TestRunTrial:
    def test_deterministic(self):
        cfg = small_config()
        cell = GridCell(DistributionKind.GAUSSIAN, 8, 40)
        a = run_trial(cell, 3, cfg)
        b = run_trial(cell, 3, cfg)
        assert (a.svp, a.degenerate, a.min_margin_slack) == (
            b.svp,
            b.degenerate,
            b.min_margin_slack,
        )

    def test_matches_direct_detection(self):
        from svplab.detection import detect_svp_l2
        from svplab.sampling import SampleSpec, derive_seed, draw_dataset

        cfg = small_config()
        cell = GridCell(DistributionKind.GAUSSIAN, 8, 40)
        rec = run_trial(cell, 7, cfg)
        seed = derive_seed(cfg.master_seed, "gaussian", 8, 40, 7)
        ds = draw_dataset(
            SampleSpec(n=8, d=40, distribution=DistributionKind.GAUSSIAN, lam=np.ones(40), seed=seed)
        )
        assert rec.svp == detect_svp_l2(ds, tol=cfg.tolerance).svp

    def test_low_dimension_rarely_proliferates(self):
        # n = d = 20: far below the boundary, expect essentially no SVP
        cfg = GridConfig.from_dict(
            {
                "distributions": ["gaussian"],
                "n_values": [20],
                "d_values": [20],
                "trials": 100,
                "master_seed": 3,
            }
        )
        summary = run_grid(cfg)[0]
        assert summary.rate <= 0.01


class TestRunGrid:
    def test_single_trial_rate_is_zero_or_one(self):
        cfg = small_config(trials=1)
        for s in run_grid(cfg):
            assert s.rate in (0.0, 1.0)
            assert s.svp_count + s.degenerate_count <= 1

    def test_summaries_sorted_and_complete(self):
        cfg = small_config(distributions=["uniform", "gaussian"])
        summaries = run_grid(cfg)
        keys = [(s.distribution.label, s.n, s.d) for s in summaries]
        assert keys == [
            ("uniform", 8, 8),
            ("uniform", 8, 40),
            ("gaussian", 8, 8),
            ("gaussian", 8, 40),
        ]
        assert all(s.trials == 20 for s in summaries)

    def test_worker_count_does_not_change_bytes(self, tmp_path):
        cfg = small_config(trials=30)
        one = tmp_path / "w1.csv"
        four = tmp_path / "w4.csv"
        persist_results(run_grid(cfg, workers=1), str(one))
        persist_results(run_grid(cfg, workers=4), str(four))
        assert filecmp.cmp(str(one), str(four), shallow=False)

    def test_degenerate_counted_separately(self, tmp_path):
        # Rademacher at n=d=4 collides often: degenerate trials counted, not SVP
        cfg = GridConfig.from_dict(
            {
                "distributions": ["rademacher"],
                "n_values": [4],
                "d_values": [4],
                "trials": 200,
                "master_seed": 11,
            }
        )
        summary = run_grid(cfg)[0]
        assert summary.degenerate_count > 0
        assert summary.svp_count + summary.degenerate_count <= summary.trials
        path = tmp_path / "degen.csv"
        persist_results([summary], str(path))
        assert load_results(str(path))[0].degenerate_count == summary.degenerate_count

    def test_progress_callback_runs_per_cell(self):
        seen = []
        cfg = small_config(trials=2)
        run_grid(cfg, progress=seen.append)
        assert len(seen) == 2
        assert all(isinstance(s, CellSummary) for s in seen)

    def test_rate_stability_across_master_seeds(self):
        # binomial consistency: an independent master seed reproduces each
        # rate within a sqrt(2)-widened 95% interval (two independent
        # estimates are being compared, hence the widening)
        base = {
            "distributions": ["gaussian"],
            "n_values": [16, 24],
            "tau_values": [0.5, 0.7, 0.9, 1.1, 1.3, 1.5],
            "trials": 400,
        }
        first = run_grid(GridConfig.from_dict({**base, "master_seed": 1}), workers=2)
        second = run_grid(GridConfig.from_dict({**base, "master_seed": 2}), workers=2)
        z = 1.959963984540054 * math.sqrt(2.0)
        hits = 0
        for a, b in zip(first, second):
            lo, hi = wilson_interval(a.svp_count, a.trials, z)
            hits += lo <= b.rate <= hi
        # 11 of 12 is the discrete floor of the 95%-of-cells contract
        assert hits >= 11

    def test_rates_nondecreasing_in_d_up_to_noise(self):
        cfg = GridConfig.from_dict(
            {
                "distributions": ["gaussian"],
                "n_values": [24],
                "tau_values": [0.5, 0.75, 1.0, 1.25, 1.5],
                "trials": 100,
                "master_seed": 8,
            }
        )
        cells = run_grid(cfg)
        for prev, cur in zip(cells, cells[1:]):
            pooled = (prev.svp_count + cur.svp_count) / (prev.trials + cur.trials)
            se = math.sqrt(max(pooled * (1 - pooled), 1e-12) * (1 / prev.trials + 1 / cur.trials))
            assert cur.rate >= prev.rate - 3 * se


class TestPersistence:
    def test_round_trip(self, tmp_path):
        cfg = small_config(trials=5)
        summaries, records = run_grid_records(cfg)
        path = tmp_path / "summary.csv"
        trial_path = tmp_path / "trials.csv"
        persist_results(summaries, str(path), records=records, records_path=str(trial_path))
        assert load_results(str(path)) == summaries
        header = trial_path.read_text().splitlines()[0]
        assert header == "distribution,norm,n,d,trial,svp,degenerate,min_margin_slack"

    def test_summary_header_is_stable(self, tmp_path):
        cfg = small_config(trials=1)
        path = tmp_path / "summary.csv"
        persist_results(run_grid(cfg), str(path))
        header = path.read_text().splitlines()[0]
        assert header == (
            "distribution,norm,n,d,tau,trials,svp_count,degenerate_count,"
            "rate,ci_low,ci_high,master_seed"
        )

    def test_malformed_row_names_line(self, tmp_path):
        cfg = small_config(trials=1)
        path = tmp_path / "summary.csv"
        persist_results(run_grid(cfg), str(path))
        lines = path.read_text().splitlines()
        lines[2] = lines[2].replace("l2", "l2,extra")
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(InvalidSpec, match="line 3"):
            load_results(str(path))

    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "summary.csv"
        path.write_text("foo,bar\n")
        with pytest.raises(InvalidSpec, match="line 1"):
            load_results(str(path))

    def test_filter_summaries(self):
        cfg = small_config(distributions=["uniform", "gaussian"], trials=1)
        summaries = run_grid(cfg)
        only = filter_summaries(summaries, distribution="uniform")
        assert {s.distribution.label for s in only} == {"uniform"}
        assert filter_summaries(summaries, norm="l1") == []
