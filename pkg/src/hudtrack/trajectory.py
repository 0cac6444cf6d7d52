"""Flight track assembly and the two-stage spatial filter.

Stage 1 flags points whose latitude or longitude strays from a rolling
window median by more than max(k * MAD, floor).  Stage 2 projects the
survivors to UTM and keeps only points within a buffer distance of the
baseline polyline (the stage-1 rolling-median path); a raw survivor that
slipped past the coarse stage sits far from that smoothed line and gets
caught there.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field, replace

from .errors import EmptyTrack
from .geodesy import MethodParams, project_track

__all__ = ["TelemetryRecord", "FlightTrack", "FilterParams", "DropReport",
           "assemble_track", "median_outlier_filter", "median_baseline",
           "utm_buffer_filter", "two_stage_filter",
           "point_to_polyline_distance"]


@dataclass(frozen=True)
class TelemetryRecord:
    t: float
    lat: float
    lon: float
    frame_index: int = 0
    altitude: float | None = None
    airspeed: float | None = None
    vspeed: float | None = None
    battery: float | None = None
    capacity_used: float | None = None
    field_status: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("timestamp must be non-negative")
        if not -90.0 <= self.lat <= 90.0 or not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"invalid coordinates ({self.lat}, {self.lon})")


@dataclass(frozen=True)
class FlightTrack:
    records: tuple[TelemetryRecord, ...]
    crs: str = "WGS84"

    def __post_init__(self):
        times = [r.t for r in self.records]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError("track timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class FilterParams:
    median_window: int = 5
    mad_multiplier: float = 6.0
    mad_floor_deg: float = 0.02
    buffer_m: float = 2000.0
    utm_zone_override: int | None = None

    def __post_init__(self):
        if self.median_window < 3 or self.median_window % 2 == 0:
            raise ValueError("median_window must be odd >= 3")
        if self.mad_multiplier <= 0 or self.buffer_m <= 0:
            raise ValueError("mad_multiplier and buffer_m must be positive")


@dataclass
class DropReport:
    """Frames that never made it into the track, with reasons."""

    dropped: list[dict] = field(default_factory=list)

    def add(self, frame_index: int, reason: str, detail: str = "") -> None:
        self.dropped.append(
            {"frame_index": frame_index, "reason": reason, "detail": detail})

    def to_list(self) -> list[dict]:
        return list(self.dropped)


def assemble_track(frame_values: list[tuple[int, float, dict]],
                   ) -> tuple[FlightTrack, DropReport]:
    """Build a track from per-frame parsed values.

    ``frame_values`` holds (frame_index, t_seconds, fields) tuples where
    ``fields`` maps field name -> (value, status).  A frame enters the
    track only when both lat and lon parsed; everything else attaches
    when available.
    """
    report = DropReport()
    records: list[TelemetryRecord] = []
    seen: set[int] = set()
    for frame_index, t, fields in sorted(frame_values, key=lambda fv: fv[1]):
        if frame_index in seen:
            report.add(frame_index, "DuplicateFrame",
                       "frame already contributed a record")
            continue
        seen.add(frame_index)

        status = tuple(sorted((name, st) for name, (_, st) in fields.items()))
        lat = _ok_value(fields, "lat")
        lon = _ok_value(fields, "lon")
        if lat is None or lon is None:
            bad = [name for name in ("lat", "lon") if _ok_value(fields, name) is None]
            report.add(frame_index, "CoordinateUnreadable",
                       f"missing or invalid: {', '.join(bad)}")
            continue
        records.append(TelemetryRecord(
            t=t, lat=lat, lon=lon, frame_index=frame_index,
            altitude=_ok_value(fields, "altitude"),
            airspeed=_ok_value(fields, "airspeed"),
            vspeed=_ok_value(fields, "vspeed"),
            battery=_ok_value(fields, "battery"),
            capacity_used=_ok_value(fields, "capacity_used"),
            field_status=status))
    if not records:
        raise EmptyTrack("no frame produced both latitude and longitude")
    return FlightTrack(tuple(records)), report


def _ok_value(fields: dict, name: str) -> float | None:
    entry = fields.get(name)
    if entry is None:
        return None
    value, status = entry
    return value if status == "ok" else None


def _window_bounds(i: int, n: int, window: int) -> tuple[int, int]:
    half = window // 2
    return max(0, i - half), min(n, i + half + 1)


def _rolling_median_mad(values: list[float], window: int
                        ) -> tuple[list[float], list[float]]:
    n = len(values)
    medians, mads = [], []
    for i in range(n):
        lo, hi = _window_bounds(i, n, window)
        win = values[lo:hi]
        med = statistics.median(win)
        mad = statistics.median([abs(v - med) for v in win])
        medians.append(med)
        mads.append(mad)
    return medians, mads


def median_outlier_filter(track: FlightTrack, p: FilterParams = FilterParams()
                          ) -> tuple[FlightTrack, list[TelemetryRecord]]:
    """Stage 1: drop records far from the windowed median of lat or lon."""
    if not track.records:
        raise EmptyTrack("cannot filter an empty track")
    lats = [r.lat for r in track.records]
    lons = [r.lon for r in track.records]
    med_lat, mad_lat = _rolling_median_mad(lats, p.median_window)
    med_lon, mad_lon = _rolling_median_mad(lons, p.median_window)

    kept, removed = [], []
    for i, rec in enumerate(track.records):
        thr_lat = max(p.mad_multiplier * mad_lat[i], p.mad_floor_deg)
        thr_lon = max(p.mad_multiplier * mad_lon[i], p.mad_floor_deg)
        if abs(rec.lat - med_lat[i]) > thr_lat or abs(rec.lon - med_lon[i]) > thr_lon:
            removed.append(rec)
        else:
            kept.append(rec)
    return FlightTrack(tuple(kept), track.crs), removed


def median_baseline(track: FlightTrack, p: FilterParams = FilterParams()
                    ) -> FlightTrack:
    """Rolling-median path of a track: the stage-2 baseline polyline."""
    if not track.records:
        raise EmptyTrack("cannot smooth an empty track")
    lats = [r.lat for r in track.records]
    lons = [r.lon for r in track.records]
    med_lat, _ = _rolling_median_mad(lats, p.median_window)
    med_lon, _ = _rolling_median_mad(lons, p.median_window)
    smoothed = tuple(replace(rec, lat=med_lat[i], lon=med_lon[i])
                     for i, rec in enumerate(track.records))
    return FlightTrack(smoothed, track.crs)


def point_to_polyline_distance(pt: tuple[float, float],
                               polyline: list[tuple[float, float]]) -> float:
    """Minimum Euclidean distance from a point to a polyline (meters).

    A single-vertex polyline degrades to plain point distance.
    """
    if not polyline:
        raise ValueError("polyline needs at least one vertex")
    px, py = pt
    if len(polyline) == 1:
        qx, qy = polyline[0]
        return math.hypot(px - qx, py - qy)
    best = math.inf
    for (ax, ay), (bx, by) in zip(polyline, polyline[1:]):
        dx, dy = bx - ax, by - ay
        seg2 = dx * dx + dy * dy
        if seg2 == 0.0:
            d = math.hypot(px - ax, py - ay)
        else:
            u = ((px - ax) * dx + (py - ay) * dy) / seg2
            u = min(1.0, max(0.0, u))
            d = math.hypot(px - (ax + u * dx), py - (ay + u * dy))
        if d < best:
            best = d
    return best


def utm_buffer_filter(track: FlightTrack, baseline: FlightTrack,
                      p: FilterParams = FilterParams()
                      ) -> tuple[FlightTrack, list[TelemetryRecord]]:
    """Stage 2: keep records within ``buffer_m`` of the baseline polyline.

    Both the candidates and the baseline are projected into one UTM zone
    (auto-selected from the median longitude of the baseline unless
    overridden).  The buffer test is boundary-inclusive.
    """
    if not baseline.records:
        raise EmptyTrack("buffer filter needs a non-empty baseline")
    params = MethodParams(utm_zone_override=p.utm_zone_override)
    base_proj = project_track(baseline, params)
    zone = base_proj[0].zone
    cand_proj = project_track(
        track, MethodParams(utm_zone_override=zone))
    polyline = [(q.easting, q.northing) for q in base_proj]

    kept, removed = [], []
    for rec, proj in zip(track.records, cand_proj):
        d = point_to_polyline_distance((proj.easting, proj.northing), polyline)
        if d <= p.buffer_m:
            kept.append(rec)
        else:
            removed.append(rec)
    return FlightTrack(tuple(kept), track.crs), removed


def two_stage_filter(track: FlightTrack, p: FilterParams = FilterParams(),
                     revalidate_rejected: bool = False
                     ) -> tuple[FlightTrack, list[TelemetryRecord], list[TelemetryRecord]]:
    """Median stage then UTM buffer stage.

    Returns (clean_track, stage1_removed, stage2_removed).  With
    ``revalidate_rejected`` the stage-1 rejects get a second chance
    against the buffer (off by default: stage 1 exists to build an
    uncorrupted baseline, re-admitting its rejects defeats that).
    """
    stage1, removed1 = median_outlier_filter(track, p)
    if not stage1.records:
        raise EmptyTrack("stage-1 filter removed every record")
    baseline = median_baseline(stage1, p)
    candidates = track if revalidate_rejected else stage1
    stage2, removed2 = utm_buffer_filter(candidates, baseline, p)
    if revalidate_rejected:
        removed1 = [r for r in removed1 if r not in stage2.records]
    return stage2, removed1, removed2
