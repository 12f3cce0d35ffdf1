"""Sweep engine, CSV schema, threshold estimators, ratio and timing studies."""

import numpy as np
import pytest

from surfdec import harness, neural
from surfdec.harness import (
    CSV_COLUMNS,
    CsvFormatError,
    CurvePoint,
    SweepConfig,
    estimate_pseudo_threshold,
    estimate_threshold,
    points_to_csv,
    read_curve_csv,
    run_sweep,
    select_points,
    timing_report,
    train_test_ratio_study,
    write_curve_csv,
)
from surfdec.noise import cycle_error_probability

FAST_TRAIN = neural.TrainConfig(batch_size=64, epochs=30, learning_rate=0.5, seed=0)


def synthetic_point(p, rate, d=3, decoder="mwpm", level="LLD", trials=100000,
                    instances=1, sd=0.0):
    return CurvePoint(d=d, decoder=decoder, level=level, noise_kind="depolarizing",
                      eta=1.0, p_step=p, p_cycle=cycle_error_probability(p),
                      trials=trials, instances=instances,
                      logical_error_rate=rate, accuracy=1.0 - rate, sd=sd, seed=0)


def power_curve(exponent, scale, grid, **kw):
    return [synthetic_point(p, scale * p ** exponent, **kw) for p in grid]


class TestSweepConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SweepConfig(p_grid=(0.01, 0.01))
        with pytest.raises(ValueError):
            SweepConfig(trials=50)
        with pytest.raises(ValueError):
            SweepConfig(decoders=("magic",))
        with pytest.raises(ValueError):
            SweepConfig(distances=(4,))

    def test_manifest_is_json_ready(self):
        import json

        config = SweepConfig(p_grid=(0.001, 0.01), trials=100)
        json.dumps(config.manifest())


@pytest.fixture(scope="module")
def smoke_points():
    config = SweepConfig(
        distances=(3,), p_grid=(0.0, 0.002, 0.02), decoders=("mwpm", "ffnn-simple"),
        trials=400, instances=2, base_seed=99, dataset_size=3000,
        train=FAST_TRAIN, jobs=1)
    return config, run_sweep(config)


class TestRunSweep:
    def test_zero_noise_row_has_zero_error_rate(self, smoke_points):
        _config, points = smoke_points
        for pt in points:
            if pt.p_step == 0.0:
                assert pt.logical_error_rate == 0.0
                assert pt.accuracy == 1.0

    def test_row_counts_and_levels(self, smoke_points):
        _config, points = smoke_points
        mwpm_rows = [pt for pt in points if pt.decoder == "mwpm"]
        ml_rows = [pt for pt in points if pt.decoder == "ffnn-simple"]
        assert len(mwpm_rows) == 3                      # one level
        assert len(ml_rows) == 6                        # LLD and LLD+HLD
        assert {pt.level for pt in mwpm_rows} == {"LLD"}
        assert {pt.level for pt in ml_rows} == {"LLD", "LLD+HLD"}

    def test_p_cycle_consistent(self, smoke_points):
        _config, points = smoke_points
        for pt in points:
            assert pt.p_cycle == pytest.approx(cycle_error_probability(pt.p_step))

    def test_rates_in_range_and_sd_nonnegative(self, smoke_points):
        _config, points = smoke_points
        for pt in points:
            assert 0.0 <= pt.logical_error_rate <= 1.0
            assert pt.accuracy == pytest.approx(1.0 - pt.logical_error_rate)
            assert pt.sd >= 0.0

    def test_rerun_reproduces_csv_bytes(self, smoke_points):
        config, points = smoke_points
        again = run_sweep(config)
        assert points_to_csv(points) == points_to_csv(again)

    def test_parallel_matches_serial(self):
        config = SweepConfig(distances=(3,), p_grid=(0.003, 0.01), decoders=("mwpm",),
                             trials=300, instances=2, base_seed=5, jobs=1)
        serial = run_sweep(config)
        parallel = run_sweep(SweepConfig(
            distances=(3,), p_grid=(0.003, 0.01), decoders=("mwpm",),
            trials=300, instances=2, base_seed=5, jobs=2))
        assert points_to_csv(serial) == points_to_csv(parallel)


class TestCsv:
    def test_round_trip(self, tmp_path):
        points = power_curve(2.0, 10.0, (0.001, 0.003, 0.01))
        path = tmp_path / "curve.csv"
        write_curve_csv(points, path, manifest={"hello": 1})
        loaded = read_curve_csv(path)
        assert loaded == points
        assert (tmp_path / "curve.csv.manifest.json").exists()

    def test_header_schema(self, tmp_path):
        path = tmp_path / "curve.csv"
        write_curve_csv(power_curve(2.0, 10.0, (0.001,)), path)
        header = path.read_text().splitlines()[0]
        assert header == ",".join(CSV_COLUMNS)

    def test_perturbed_header_rejected(self, tmp_path):
        path = tmp_path / "curve.csv"
        write_curve_csv(power_curve(2.0, 10.0, (0.001,)), path)
        lines = path.read_text().splitlines()
        lines[0] = lines[0].replace("p_step", "p")
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(CsvFormatError):
            read_curve_csv(path)

    def test_malformed_row_reports_line(self, tmp_path):
        path = tmp_path / "curve.csv"
        write_curve_csv(power_curve(2.0, 10.0, (0.001, 0.002)), path)
        lines = path.read_text().splitlines()
        lines[2] = lines[2].replace("3,mwpm", "three,mwpm")
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(CsvFormatError, match="line 3"):
            read_curve_csv(path)

    def test_select_points_sorts_by_p(self):
        pts = power_curve(2.0, 10.0, (0.01, 0.001, 0.005))
        out = select_points(pts, d=3, decoder="mwpm", level="LLD")
        assert [pt.p_step for pt in out] == sorted(pt.p_step for pt in pts)


class TestPseudoThresholdEstimation:
    def test_always_below_identity_flags_no_crossing(self):
        # p_L = p^2 stays below the identity line on (0, 1)
        grid = np.geomspace(0.001, 0.5, 8)
        estimate = estimate_pseudo_threshold(power_curve(2.0, 1.0, grid))
        assert not estimate.found
        assert "never crosses" in estimate.method["reason"]

    def test_power_law_crossing_recovered_exactly(self):
        # p_L = p^1.5 / sqrt(p0) crosses p_L = p at exactly p0; log-log
        # interpolation is exact on power laws
        p0 = 0.03
        grid = np.geomspace(0.005, 0.1, 7)
        curve = power_curve(1.5, p0 ** -0.5, grid)
        estimate = estimate_pseudo_threshold(curve)
        assert estimate.found
        assert estimate.value == pytest.approx(p0, rel=1e-9)
        lo, hi = estimate.method["bracket"]
        assert lo <= estimate.value <= hi
        assert estimate.ci_low <= estimate.value <= estimate.ci_high

    def test_cycle_axis_crossing(self):
        # the same curve crossed against the per-cycle identity line moves
        # the crossing right (the line sits ~8x higher at small p) and the
        # estimate is reported in per-cycle units
        p0 = 0.005
        grid = np.geomspace(0.002, 0.6, 14)
        curve = power_curve(1.5, p0 ** -0.5, grid)
        step = estimate_pseudo_threshold(curve, axis="p_step")
        cycle = estimate_pseudo_threshold(curve, axis="p_cycle")
        assert step.found and step.value == pytest.approx(p0, rel=1e-9)
        assert cycle.found
        assert cycle.method["axis"] == "p_cycle"
        assert cycle.value > step.value
        lo, hi = cycle.method["bracket"]
        assert lo <= cycle.value <= hi

    def test_requires_two_points(self):
        with pytest.raises(ValueError):
            estimate_pseudo_threshold(power_curve(2.0, 1.0, (0.01,)))

    def test_bad_axis(self):
        with pytest.raises(ValueError):
            estimate_pseudo_threshold(power_curve(2.0, 1.0, (0.01, 0.02)), axis="q")


class TestThresholdEstimation:
    def test_closed_form_crossing_recovered(self):
        # A(p) = p^2/p0 and B(p) = p^3/p0^2 intersect at exactly p0
        p0 = 0.02
        grid = np.geomspace(0.004, 0.08, 9)
        curves = {3: power_curve(2.0, 1.0 / p0, grid, d=3),
                  5: power_curve(3.0, 1.0 / p0 ** 2, grid, d=5)}
        estimate = estimate_threshold(curves)
        assert estimate.found
        assert estimate.value == pytest.approx(p0, rel=1e-9)

    def test_three_distances_average_pairwise(self):
        p0 = 0.02
        grid = np.geomspace(0.004, 0.08, 9)
        curves = {3: power_curve(2.0, 1.0 / p0, grid, d=3),
                  5: power_curve(3.0, 1.0 / p0 ** 2, grid, d=5),
                  7: power_curve(4.0, 1.0 / p0 ** 3, grid, d=7)}
        estimate = estimate_threshold(curves)
        assert estimate.value == pytest.approx(p0, rel=1e-9)
        assert len(estimate.method["pairs"]) == 2

    def test_identical_curves_flagged_degenerate(self):
        grid = np.geomspace(0.004, 0.08, 5)
        curves = {3: power_curve(2.0, 5.0, grid, d=3),
                  5: power_curve(2.0, 5.0, grid, d=5)}
        estimate = estimate_threshold(curves)
        assert not estimate.found
        assert any("degenerate" in str(pair.get("reason", ""))
                   for pair in estimate.method["pairs"])

    def test_no_crossing_in_range(self):
        grid = np.geomspace(0.001, 0.01, 5)
        p0 = 0.5   # crossing far beyond the grid
        curves = {3: power_curve(2.0, 1.0 / p0, grid, d=3),
                  5: power_curve(3.0, 1.0 / p0 ** 2, grid, d=5)}
        estimate = estimate_threshold(curves)
        assert not estimate.found

    def test_cycle_axis_converts_value(self):
        p0 = 0.02
        grid = np.geomspace(0.004, 0.08, 9)
        curves = {3: power_curve(2.0, 1.0 / p0, grid, d=3),
                  5: power_curve(3.0, 1.0 / p0 ** 2, grid, d=5)}
        step = estimate_threshold(curves, axis="p_step")
        cycle = estimate_threshold(curves, axis="p_cycle")
        assert cycle.value == pytest.approx(cycle_error_probability(step.value), rel=1e-9)

    def test_needs_two_distances(self):
        with pytest.raises(ValueError):
            estimate_threshold({3: power_curve(2.0, 1.0, (0.01, 0.02))})


class TestRatioStudy:
    def test_full_train_ratio_rejected(self):
        with pytest.raises(ValueError):
            train_test_ratio_study(3, "ffnn-simple", (0.001,), ratios=(1.0,),
                                   instances=1, dataset_size=1000, train=FAST_TRAIN)

    def test_smoke_rows_and_determinism(self):
        kwargs = dict(ratios=(0.7, 0.4), instances=2, dataset_size=2000,
                      train=FAST_TRAIN, base_seed=17, jobs=1)
        rows = train_test_ratio_study(3, "ffnn-simple", (0.002,), **kwargs)
        again = train_test_ratio_study(3, "ffnn-simple", (0.002,), **kwargs)
        assert harness.ratio_points_to_csv(rows) == harness.ratio_points_to_csv(again)
        assert len(rows) == 2
        for row in rows:
            assert row.train_ratio + row.test_ratio == pytest.approx(1.0)
            assert 0.0 <= row.mean_accuracy <= 1.0
            assert row.sd >= 0.0

    def test_ratio_csv_header(self, tmp_path):
        rows = train_test_ratio_study(3, "ffnn-simple", (0.002,), ratios=(0.5,),
                                      instances=1, dataset_size=1500,
                                      train=FAST_TRAIN, jobs=1)
        path = tmp_path / "ratio.csv"
        harness.write_ratio_csv(rows, path, manifest={"x": 1})
        header = path.read_text().splitlines()[0]
        assert header == ",".join(harness.RATIO_CSV_COLUMNS)


class TestTimingReport:
    def test_mwpm_decode_latency_measurable(self):
        from surfdec.code import build_layout

        latency = harness.measure_mwpm_decode_time(build_layout(3), p=0.01,
                                                   repeats=500, seed=3)
        assert 0.0 < latency < 0.01

    def test_structure_and_ordering(self):
        rows = timing_report(("ffnn-simple",), (3,), p=0.005, dataset_size=1500,
                             train=FAST_TRAIN, prediction_repeats=200)
        assert len(rows) == 1
        row = rows[0]
        assert row.parameter_count == 1378
        assert row.lld_train_seconds > 0
        assert row.mean_prediction_seconds > 0
        # single-sample prediction is orders of magnitude below training
        assert row.mean_prediction_seconds < row.lld_train_seconds / 100
