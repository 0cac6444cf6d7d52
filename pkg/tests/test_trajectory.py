import numpy as np
import pytest

from hudtrack.errors import EmptyTrack
from hudtrack.geodesy import GeoPoint, destination_point, haversine_m
from hudtrack.synth import FlightSimParams, simulate_flight
from hudtrack.trajectory import (FilterParams, FlightTrack, TelemetryRecord,
                                 assemble_track, median_baseline,
                                 median_outlier_filter,
                                 point_to_polyline_distance, two_stage_filter,
                                 utm_buffer_filter)

from .oracles import ref_polyline_distance_sampled


def mk_track(points, dt=1.0):
    return FlightTrack(tuple(
        TelemetryRecord(t=i * dt, lat=lat, lon=lon, frame_index=i)
        for i, (lat, lon) in enumerate(points)))


def displace(rec: TelemetryRecord, bearing_deg: float, dist_m: float) -> TelemetryRecord:
    moved = destination_point(GeoPoint(rec.lat, rec.lon), bearing_deg, dist_m)
    return TelemetryRecord(t=rec.t, lat=moved.lat, lon=moved.lon,
                           frame_index=rec.frame_index)


class TestAssembleTrack:
    @staticmethod
    def fields(lat=None, lon=None, alt=None):
        out = {}
        if lat is not None:
            out["lat"] = (lat, "ok")
        if lon is not None:
            out["lon"] = (lon, "ok")
        if alt is not None:
            out["altitude"] = (alt, "ok")
        return out

    def test_all_parseable(self):
        values = [(i, float(i), self.fields(47.0 + i * 1e-4, 15.0, 1500.0))
                  for i in range(122)]
        track, report = assemble_track(values)
        assert len(track.records) == 122
        assert report.to_list() == []

    def test_unreadable_longitude_dropped(self):
        values = [(0, 0.0, self.fields(47.0, 15.0)),
                  (1, 1.0, {"lat": (47.0, "ok"), "lon": (None, "char_invalid")}),
                  (2, 2.0, self.fields(47.0002, 15.0))]
        track, report = assemble_track(values)
        assert [r.frame_index for r in track.records] == [0, 2]
        assert report.to_list()[0]["frame_index"] == 1
        assert report.to_list()[0]["reason"] == "CoordinateUnreadable"

    def test_duplicate_frame_rejected(self):
        values = [(0, 0.0, self.fields(47.0, 15.0)),
                  (0, 0.5, self.fields(47.1, 15.1)),
                  (1, 1.0, self.fields(47.0001, 15.0))]
        track, report = assemble_track(values)
        assert len(track.records) == 2
        assert track.records[0].lat == 47.0
        assert report.to_list()[0]["reason"] == "DuplicateFrame"

    def test_empty_track_raises(self):
        with pytest.raises(EmptyTrack):
            assemble_track([(0, 0.0, {"lat": (None, "empty")})])

    def test_optional_fields_attach(self):
        values = [(0, 0.0, self.fields(47.0, 15.0, alt=1500.0))]
        track, _ = assemble_track(values)
        assert track.records[0].altitude == 1500.0


class TestMedianOutlierFilter:
    def test_linear_track_untouched(self):
        pts = [(47.0 + 0.0008 * i, 15.0 + 0.0005 * i) for i in range(10)]
        clean, removed = median_outlier_filter(mk_track(pts))
        assert removed == []
        assert len(clean.records) == 10

    def test_single_big_outlier_removed(self):
        pts = [(47.0 + 0.0008 * i, 15.0) for i in range(9)]
        pts[4] = (pts[4][0] + 1.0, pts[4][1])  # one degree of latitude
        clean, removed = median_outlier_filter(mk_track(pts))
        assert [r.frame_index for r in removed] == [4]
        assert len(clean.records) == 8

    def test_partition_and_order(self):
        pts = [(47.0 + 0.0008 * i, 15.0) for i in range(20)]
        for i in (3, 11):
            pts[i] = (pts[i][0] + 0.5, pts[i][1])
        track = mk_track(pts)
        clean, removed = median_outlier_filter(track)
        together = sorted(list(clean.records) + removed, key=lambda r: r.t)
        assert together == list(track.records)

    def test_shift_invariance(self):
        rng = np.random.default_rng(5)
        pts = [(47.0 + 0.0008 * i + rng.normal(0, 1e-5),
                15.0 + rng.normal(0, 1e-5)) for i in range(30)]
        for i in (7, 19):
            pts[i] = (pts[i][0] + 0.3, pts[i][1] - 0.2)
        base_removed = [r.frame_index
                        for r in median_outlier_filter(mk_track(pts))[1]]
        shifted = [(lat + 1.5, lon - 2.5) for lat, lon in pts]
        shift_removed = [r.frame_index
                         for r in median_outlier_filter(mk_track(shifted))[1]]
        assert base_removed == shift_removed == [7, 19]

    def test_edge_window_outlier(self):
        pts = [(47.0 + 0.0008 * i, 15.0) for i in range(8)]
        pts[0] = (pts[0][0] + 0.8, pts[0][1])
        clean, removed = median_outlier_filter(mk_track(pts))
        assert [r.frame_index for r in removed] == [0]


class TestPolylineDistance:
    def test_perpendicular_foot(self):
        assert point_to_polyline_distance((0, 1), [(-1, 0), (1, 0)]) == 1.0

    def test_beyond_endpoint(self):
        assert point_to_polyline_distance((3, 0), [(0, 0), (1, 0)]) == 2.0

    def test_single_vertex(self):
        assert point_to_polyline_distance((3, 4), [(0, 0)]) == 5.0

    def test_vertex_hit(self):
        assert point_to_polyline_distance((1, 0), [(0, 0), (1, 0), (1, 5)]) == 0.0

    def test_matches_sampled_oracle(self):
        rng = np.random.default_rng(77)
        poly = [(float(x), float(rng.normal(0, 3))) for x in range(6)]
        for _ in range(5):
            pt = (float(rng.uniform(-2, 7)), float(rng.uniform(-6, 6)))
            fast = point_to_polyline_distance(pt, poly)
            slow = ref_polyline_distance_sampled(pt, poly, samples_per_segment=20_000)
            assert fast == pytest.approx(slow, rel=1e-6, abs=1e-4)


class TestUtmBufferFilter:
    def make_baseline(self, n=30):
        return mk_track([(47.0 + 0.0005 * i, 15.0) for i in range(n)])

    def test_points_on_baseline_kept(self):
        base = self.make_baseline()
        clean, removed = utm_buffer_filter(base, base)
        assert removed == []

    def test_3km_perpendicular_removed(self):
        base = self.make_baseline()
        candidate_records = list(base.records)
        candidate_records[10] = displace(candidate_records[10], 90.0, 3000.0)
        cand = FlightTrack(tuple(candidate_records))
        clean, removed = utm_buffer_filter(cand, base)
        assert [r.frame_index for r in removed] == [10]

    def test_boundary_inclusive(self):
        base = self.make_baseline()
        candidate_records = list(base.records)
        candidate_records[10] = displace(candidate_records[10], 90.0, 1500.0)
        cand = FlightTrack(tuple(candidate_records))
        # find the exact projected distance, then use it as the buffer
        from hudtrack.geodesy import MethodParams, project_track
        proj_base = project_track(base, MethodParams(utm_zone_override=33))
        proj_cand = project_track(cand, MethodParams(utm_zone_override=33))
        poly = [(q.easting, q.northing) for q in proj_base]
        d = point_to_polyline_distance(
            (proj_cand[10].easting, proj_cand[10].northing), poly)
        params = FilterParams(buffer_m=d, utm_zone_override=33)
        clean, removed = utm_buffer_filter(cand, base, params)
        assert removed == []  # distance exactly equal to the buffer: kept

    def test_huge_buffer_removes_nothing(self):
        base = self.make_baseline()
        candidate_records = list(base.records)
        candidate_records[5] = displace(candidate_records[5], 45.0, 40_000.0)
        cand = FlightTrack(tuple(candidate_records))
        clean, removed = utm_buffer_filter(
            cand, base, FilterParams(buffer_m=1e9))
        assert removed == []

    def test_degenerate_single_point_baseline(self):
        base = mk_track([(47.0, 15.0)])
        cand = mk_track([(47.0, 15.0), (47.001, 15.0), (47.5, 15.0)])
        clean, removed = utm_buffer_filter(cand, base)
        # radial distance from the single point: 0.5 deg lat is ~55 km away
        assert [r.frame_index for r in removed] == [2]


class TestTwoStageFilter:
    def test_adversarial_small_displacement_caught_by_stage2(self):
        # displacement below the stage-1 degree floor on both axes but
        # more than 2 km off the path
        track = simulate_flight(FlightSimParams(seed=3, duration_s=121))
        records = list(track.records)
        victim = records[60]
        moved = GeoPoint(victim.lat + 0.018, victim.lon + 0.019)
        dist = haversine_m(GeoPoint(victim.lat, victim.lon), moved)
        assert dist > 2000.0
        records[60] = TelemetryRecord(t=victim.t, lat=moved.lat, lon=moved.lon,
                                      frame_index=victim.frame_index)
        corrupted = FlightTrack(tuple(records))

        stage1, removed1 = median_outlier_filter(corrupted)
        assert 60 not in [r.frame_index for r in removed1]  # slips stage 1

        clean, removed1, removed2 = two_stage_filter(corrupted)
        gone = {r.frame_index for r in removed1} | {r.frame_index for r in removed2}
        assert gone == {60}
        assert len(clean.records) == len(records) - 1

    def test_smooth_track_fully_retained(self):
        track = simulate_flight(FlightSimParams(seed=11, duration_s=90))
        clean, removed1, removed2 = two_stage_filter(track)
        assert removed1 == [] and removed2 == []
        assert len(clean.records) == len(track.records)

    def test_injected_corruptions_exactly_removed(self):
        rng = np.random.default_rng(2)
        track = simulate_flight(FlightSimParams(seed=2, duration_s=121))
        records = list(track.records)
        n = len(records)
        candidates = rng.permutation(n)
        chosen: list[int] = []
        for idx in candidates:  # keep corruptions non-adjacent
            if all(abs(idx - c) >= 2 for c in chosen):
                chosen.append(int(idx))
            if len(chosen) == 25:
                break
        for idx in chosen:
            bearing = float(rng.uniform(0, 360))
            dist = float(rng.uniform(2500.0, 50_000.0))
            records[idx] = displace(records[idx], bearing, dist)
        corrupted = FlightTrack(tuple(records))
        clean, removed1, removed2 = two_stage_filter(corrupted)
        gone = {r.frame_index for r in removed1} | {r.frame_index for r in removed2}
        assert gone == set(chosen)

    def test_median_baseline_smooths(self):
        pts = [(47.0 + 0.0005 * i, 15.0) for i in range(9)]
        pts[4] = (pts[4][0], 15.02)  # bump one longitude
        base = median_baseline(mk_track(pts))
        assert base.records[4].lon == 15.0  # median suppresses the bump
