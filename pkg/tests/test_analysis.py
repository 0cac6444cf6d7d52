import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hudtrack.analysis import (altitude_stats, compare_methods,
                               point_spacing_stats, reduction_vs_baseline,
                               resample, retention_stats, rmse,
                               sampling_experiment, speed_stats)
from hudtrack.errors import EmptyInput, NoAlignment, NoAltitudeData
from hudtrack.geodesy import DistanceMethod, GeoPoint
from hudtrack.synth import FlightSimParams, simulate_flight
from hudtrack.trajectory import FlightTrack, TelemetryRecord


def mk_track(points, dt=1.0, alts=None):
    return FlightTrack(tuple(
        TelemetryRecord(t=i * dt, lat=lat, lon=lon, frame_index=i,
                        altitude=None if alts is None else alts[i])
        for i, (lat, lon) in enumerate(points)))


class TestResample:
    def test_122_at_5s_gives_25(self):
        track = simulate_flight(FlightSimParams(seed=0, duration_s=121))
        assert len(resample(track, 5).records) == 25

    def test_identity_at_1s(self):
        track = simulate_flight(FlightSimParams(seed=0, duration_s=30))
        assert resample(track, 1) == track

    def test_122_at_20s_gives_7(self):
        track = simulate_flight(FlightSimParams(seed=0, duration_s=121))
        assert len(resample(track, 20).records) == 7

    @pytest.mark.parametrize("interval,expected", [(5, 25), (10, 13), (15, 9)])
    def test_other_intervals(self, interval, expected):
        track = simulate_flight(FlightSimParams(seed=1, duration_s=121))
        assert len(resample(track, interval).records) == expected

    def test_nested_resampling(self):
        track = simulate_flight(FlightSimParams(seed=2, duration_s=120))
        assert resample(resample(track, 5), 10) == resample(track, 10)


class TestRetention:
    @pytest.mark.parametrize("raw,clean,expected", [
        (122, 82, 67.2), (25, 16, 64.0), (13, 10, 76.9),
        (9, 5, 55.6), (7, 6, 85.7)])
    def test_reported_flight_arithmetic(self, raw, clean, expected):
        retention, removal = retention_stats(raw, clean)
        assert retention == expected
        assert removal == pytest.approx(100.0 - expected)

    def test_full_retention(self):
        assert retention_stats(50, 50) == (100.0, 0.0)

    def test_empty_raw(self):
        with pytest.raises(EmptyInput):
            retention_stats(0, 0)

    @given(st.integers(1, 10_000))
    def test_bounds(self, raw):
        retention, removal = retention_stats(raw, raw // 2)
        assert 0.0 <= retention <= 100.0
        assert retention + removal == pytest.approx(100.0)


class TestReduction:
    def test_five_second_reduction(self):
        assert reduction_vs_baseline(16, 82) == 80.5

    def test_no_reduction(self):
        assert reduction_vs_baseline(82, 82) == 0.0

    def test_total_reduction(self):
        assert reduction_vs_baseline(0, 82) == 100.0

    def test_zero_baseline(self):
        with pytest.raises(EmptyInput):
            reduction_vs_baseline(5, 0)


class TestRmse:
    def test_identical_series(self):
        series = [(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]
        assert rmse(series, series) == (0.0, 0.0)

    def test_constant_offset(self):
        a = [(float(i), 10.0 + i) for i in range(5)]
        b = [(t, v + 2.5) for t, v in a]
        r, sigma = rmse(a, b)
        assert r == pytest.approx(2.5)
        assert sigma == pytest.approx(0.0, abs=1e-12)

    def test_hand_example(self):
        a = [(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]
        b = [(0.0, 2.0), (1.0, 2.0), (2.0, 5.0)]
        r, sigma = rmse(a, b)
        assert r == pytest.approx(math.sqrt(5.0 / 3.0))

    def test_alignment_on_intersection(self):
        a = [(0.0, 1.0), (5.0, 2.0), (10.0, 3.0)]
        b = [(5.0, 2.0), (7.0, 99.0)]
        r, _ = rmse(a, b)
        assert r == 0.0

    def test_no_overlap(self):
        with pytest.raises(NoAlignment):
            rmse([(0.0, 1.0)], [(1.0, 1.0)])

    @given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=40))
    @settings(max_examples=40)
    def test_symmetric(self, values):
        a = [(float(i), v) for i, v in enumerate(values)]
        b = [(float(i), v * 0.5 + 1) for i, v in enumerate(values)]
        assert rmse(a, b)[0] == pytest.approx(rmse(b, a)[0], rel=1e-12)


class TestSpeedStats:
    def test_constant(self):
        s = speed_stats([72.0, 72.0, 72.0])
        assert (s.mean_kmh, s.max_kmh, s.std_kmh) == (72.0, 72.0, 0.0)

    def test_two_values(self):
        s = speed_stats([60.0, 80.0])
        assert s.mean_kmh == 70.0
        assert s.max_kmh == 80.0
        assert s.std_kmh == pytest.approx(10.0)

    def test_single_value(self):
        s = speed_stats([42.5])
        assert s.mean_kmh == s.max_kmh == 42.5
        assert s.std_kmh == 0.0

    def test_histogram_bins(self):
        s = speed_stats([2.0, 7.0, 7.5, 12.0], bin_width_kmh=5.0)
        assert s.histogram == ((0.0, 1), (5.0, 2), (10.0, 1))

    def test_empty(self):
        with pytest.raises(EmptyInput):
            speed_stats([])


class TestAltitudeStats:
    def test_constant(self):
        track = mk_track([(47, 15)] * 3, dt=1.0, alts=[1500.0] * 3)
        s = altitude_stats(track)
        assert s.peak_m == 1500.0
        assert s.std_over_mean_pct == 0.0

    def test_two_level(self):
        track = mk_track([(47, 15), (47.001, 15)], alts=[1000.0, 1500.0])
        s = altitude_stats(track)
        assert s.peak_m == 1500.0
        assert s.mean_m == 1250.0
        assert s.std_over_mean_pct == pytest.approx(20.0)

    def test_missing_skipped_and_counted(self):
        track = mk_track([(47, 15), (47.001, 15), (47.002, 15)],
                         alts=[1000.0, None, 1200.0])
        s = altitude_stats(track)
        assert s.sample_count == 2
        assert s.missing_count == 1

    def test_no_altitude(self):
        with pytest.raises(NoAltitudeData):
            altitude_stats(mk_track([(47, 15)]))


class TestPointSpacing:
    def test_uniform_spacing(self):
        from hudtrack.geodesy import GeoPoint, destination_point
        pos = GeoPoint(47.0, 15.0)
        pts = [(pos.lat, pos.lon)]
        for _ in range(2):
            pos = destination_point(pos, 90.0, 100.0)
            pts.append((pos.lat, pos.lon))
        spacing = point_spacing_stats(mk_track(pts), DistanceMethod.HAVERSINE)
        assert spacing == pytest.approx(100.0, rel=1e-9)

    def test_synthetic_67kmh(self):
        p = FlightSimParams(seed=3, duration_s=60,
                            speed_min_kmh=67.0, speed_max_kmh=67.0)
        spacing = point_spacing_stats(simulate_flight(p), DistanceMethod.HAVERSINE)
        assert spacing == pytest.approx(67.0 / 3.6, rel=1e-3)


@pytest.fixture(scope="module")
def track():
    return simulate_flight(FlightSimParams(seed=14, duration_s=121,
                                           heading_volatility_deg=40.0,
                                           start=GeoPoint(40.2, 15.3)))


class TestCompareMethods:

    def test_all_methods_reported(self, track):
        reports = compare_methods(track, [1, 5])
        for rep in reports:
            assert set(rep.total_distance_km) == {"utm", "haversine", "raw_degrees"}

    def test_self_rmse_zero(self, track):
        rep = compare_methods(track, [1])[0]
        assert rep.pairwise_rmse_kmh["utm|utm"] == 0.0
        assert rep.pairwise_rmse_kmh["haversine|haversine"] == 0.0

    def test_utm_haversine_close(self, track):
        rep = compare_methods(track, [1])[0]
        d_utm = rep.total_distance_km["utm"]
        d_hav = rep.total_distance_km["haversine"]
        assert abs(d_utm - d_hav) / d_hav <= 0.001
        assert abs(rep.mean_speed_kmh["utm"] - rep.mean_speed_kmh["haversine"]) < 0.05

    def test_east_west_raw_bias(self):
        # constant-heading due-east flight at 47N
        from hudtrack.geodesy import GeoPoint, destination_point
        pos = GeoPoint(47.0, 15.0)
        pts = [(pos.lat, pos.lon)]
        for _ in range(120):
            pos = destination_point(pos, 90.0, 18.0)
            pts.append((pos.lat, pos.lon))
        rep = compare_methods(mk_track(pts), [1])[0]
        expected_pct = 100.0 * (1.0 / math.cos(math.radians(47.0)) - 1.0)
        got = rep.pct_diff_distance_vs_utm["raw_degrees"]
        assert got == pytest.approx(expected_pct, abs=0.5)

    def test_determinism(self, track):
        a = compare_methods(track, [1, 5])
        b = compare_methods(track, [1, 5])
        assert [r.to_dict() for r in a] == [r.to_dict() for r in b]


class TestSamplingExperiment:
    def test_reports_per_interval(self):
        track = simulate_flight(FlightSimParams(seed=21, duration_s=121))
        raw = {i: resample(track, i) for i in (1, 5, 10, 15, 20)}
        reports = sampling_experiment(raw, raw)
        assert [r.interval_s for r in reports] == [1, 5, 10, 15, 20]
        assert [r.raw_count for r in reports] == [122, 25, 13, 9, 7]
        baseline = reports[0]
        assert baseline.retention_pct == 100.0
        assert baseline.rmse_vs_baseline_kmh == pytest.approx(0.0)
        assert reports[1].reduction_vs_baseline_pct == pytest.approx(
            reduction_vs_baseline(25, 122))

    def test_missing_baseline(self):
        track = simulate_flight(FlightSimParams(seed=2, duration_s=40))
        with pytest.raises(EmptyInput):
            sampling_experiment({5: track}, {5: track}, baseline_interval=1)
