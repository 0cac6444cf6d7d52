"""Persistence: telemetry CSV, KMZ/GeoJSON flight paths, SVG charts.

All writers are atomic (temp file + rename) so a failed run never leaves
a partial artifact behind.  Chart rendering is plain hand-built SVG:
byte-identical output for identical report input.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import zipfile
from pathlib import Path
from xml.sax.saxutils import escape

from .analysis import MethodReport, SamplingReport
from .errors import EmptyTrack, NothingToRender, TooShort
from .trajectory import FlightTrack, TelemetryRecord

__all__ = ["write_track_csv", "read_track_csv", "write_kmz", "write_geojson",
           "render_charts", "atomic_write_bytes", "atomic_write_text"]

CSV_HEADER = ["t_s", "frame", "lat", "lon", "alt_m", "airspeed_kmh",
              "vspeed_ms", "battery", "capacity_mah", "status"]


def atomic_write_bytes(path: str | Path, data: bytes) -> Path:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_bytes(data)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink(missing_ok=True)
    return path


def atomic_write_text(path: str | Path, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))


def _fmt_opt(value: float | None, fmt: str) -> str:
    return "" if value is None else format(value, fmt)


def write_track_csv(track: FlightTrack, path: str | Path) -> Path:
    """One row per record; degrees at 6 decimals, meters/speeds at 1."""
    if not track.records:
        raise EmptyTrack("refusing to write an empty track")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in track.records:
        status = ";".join(f"{name}:{st}" for name, st in r.field_status)
        writer.writerow([
            f"{r.t:g}", r.frame_index, f"{r.lat:.6f}", f"{r.lon:.6f}",
            _fmt_opt(r.altitude, ".1f"), _fmt_opt(r.airspeed, ".1f"),
            _fmt_opt(r.vspeed, ".1f"), _fmt_opt(r.battery, ".1f"),
            _fmt_opt(r.capacity_used, ".1f"), status,
        ])
    return atomic_write_text(path, buf.getvalue())


def read_track_csv(path: str | Path) -> FlightTrack:
    """Inverse of ``write_track_csv``."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected CSV header {header}")
        for row in reader:
            if not row:
                continue
            t, frame, lat, lon, alt, air, vsp, batt, cap, status = row
            records.append(TelemetryRecord(
                t=float(t), lat=float(lat), lon=float(lon),
                frame_index=int(frame),
                altitude=float(alt) if alt else None,
                airspeed=float(air) if air else None,
                vspeed=float(vsp) if vsp else None,
                battery=float(batt) if batt else None,
                capacity_used=float(cap) if cap else None,
                field_status=tuple(
                    tuple(part.split(":", 1)) for part in status.split(";") if part),
            ))
    if not records:
        raise EmptyTrack(f"{path}: no records")
    return FlightTrack(tuple(records))


def write_kmz(track: FlightTrack, path: str | Path, name: str = "flight",
              extrude: bool = True) -> Path:
    """Zip archive holding exactly doc.kml with an absolute LineString.

    KML wants coordinates as lon,lat,alt — the reverse of the internal
    lat,lon order.
    """
    if len(track.records) < 2:
        raise TooShort("KMZ flight path needs at least 2 points")
    coords = " ".join(
        f"{r.lon:.6f},{r.lat:.6f},{(r.altitude or 0.0):.1f}"
        for r in track.records)
    kml = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<kml xmlns="http://www.opengis.net/kml/2.2">\n'
        "  <Document>\n"
        f"    <name>{escape(name)}</name>\n"
        "    <Placemark>\n"
        "      <name>flight path</name>\n"
        "      <LineString>\n"
        f"        <extrude>{1 if extrude else 0}</extrude>\n"
        "        <altitudeMode>absolute</altitudeMode>\n"
        f"        <coordinates>{coords}</coordinates>\n"
        "      </LineString>\n"
        "    </Placemark>\n"
        "  </Document>\n"
        "</kml>\n")
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as zf:
        info = zipfile.ZipInfo("doc.kml", date_time=(1980, 1, 1, 0, 0, 0))
        zf.writestr(info, kml)
    return atomic_write_bytes(path, buf.getvalue())


def write_geojson(track: FlightTrack, path: str | Path) -> Path:
    """FeatureCollection: one LineString plus one Point per record."""
    if not track.records:
        raise EmptyTrack("refusing to write an empty track")
    line = {
        "type": "Feature",
        "properties": {"feature": "flight_path"},
        "geometry": {
            "type": "LineString",
            "coordinates": [
                [round(r.lon, 6), round(r.lat, 6), round(r.altitude or 0.0, 1)]
                for r in track.records]},
    }
    points = [{
        "type": "Feature",
        "properties": {
            "t_s": r.t, "frame": r.frame_index, "alt_m": r.altitude,
            "airspeed_kmh": r.airspeed, "vspeed_ms": r.vspeed,
            "battery": r.battery, "capacity_mah": r.capacity_used},
        "geometry": {"type": "Point",
                     "coordinates": [round(r.lon, 6), round(r.lat, 6)]},
    } for r in track.records]
    doc = {"type": "FeatureCollection", "features": [line] + points}
    return atomic_write_text(path, json.dumps(doc, sort_keys=True, indent=1) + "\n")


# --- SVG charts -------------------------------------------------------------

_W, _H = 760, 420
_ML, _MR, _MT, _MB = 70, 30, 40, 60
_COLORS = {"utm": "#1f77b4", "haversine": "#2ca02c", "raw_degrees": "#d62728"}


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


class _Svg:
    def __init__(self, title: str):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}" font-family="monospace" font-size="12">',
            f'<rect width="{_W}" height="{_H}" fill="white"/>',
            f'<text x="{_W / 2}" y="20" text-anchor="middle" '
            f'font-size="15">{escape(title)}</text>',
        ]

    def rect(self, x, y, w, h, color):
        self.parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" '
            f'height="{_fmt(h)}" fill="{color}"/>')

    def line(self, x1, y1, x2, y2, color="#333", width=1.0):
        self.parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" '
            f'y2="{_fmt(y2)}" stroke="{color}" stroke-width="{_fmt(width)}"/>')

    def polyline(self, pts, color, width=2.0):
        joined = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        self.parts.append(
            f'<polyline points="{joined}" fill="none" stroke="{color}" '
            f'stroke-width="{_fmt(width)}"/>')

    def circle(self, x, y, r, color):
        self.parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" fill="{color}"/>')

    def text(self, x, y, s, anchor="middle", color="#000", size=12):
        self.parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" text-anchor="{anchor}" '
            f'fill="{color}" font-size="{size}">{escape(s)}</text>')

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _nice_max(v: float) -> float:
    if v <= 0:
        return 1.0
    mag = 10 ** math.floor(math.log10(v))
    for mult in (1, 2, 5, 10):
        if v <= mult * mag:
            return mult * mag
    return 10 * mag


def _axes(svg: _Svg, y_max: float, y_label: str, x_label: str):
    x0, y0 = _ML, _H - _MB
    x1, y1 = _W - _MR, _MT
    svg.line(x0, y0, x1, y0)
    svg.line(x0, y0, x0, y1)
    for i in range(5):
        val = y_max * i / 4
        y = y0 - (y0 - y1) * i / 4
        svg.line(x0 - 4, y, x0, y)
        svg.text(x0 - 8, y + 4, _fmt(val), anchor="end")
    svg.text(18, (y0 + y1) / 2, y_label, anchor="middle")
    svg.text((x0 + x1) / 2, _H - 15, x_label)
    return x0, y0, x1, y1


def _chart_counts(reports: list[SamplingReport]) -> str:
    svg = _Svg("Raw vs cleaned point counts and removal trend")
    y_max = _nice_max(max(max(r.raw_count, r.clean_count) for r in reports))
    x0, y0, x1, y1 = _axes(svg, y_max, "points", "sampling interval (s)")
    n = len(reports)
    slot = (x1 - x0) / n
    removal_pts = []
    for i, r in enumerate(reports):
        cx = x0 + slot * (i + 0.5)
        bw = min(28.0, slot / 3)
        for off, count, color in ((-bw, r.raw_count, "#888"),
                                  (0, r.clean_count, "#1f77b4")):
            h = (y0 - y1) * count / y_max
            svg.rect(cx + off, y0 - h, bw, h, color)
        svg.text(cx, y0 + 16, f"{r.interval_s}s")
        removal_pts.append((cx, y0 - (y0 - y1) * (r.removal_pct / 100.0)))
    svg.polyline(removal_pts, "#d62728")
    for x, y in removal_pts:
        svg.circle(x, y, 3, "#d62728")
    svg.text(x1 - 4, y1 + 12, "red line: removal % (0-100 on full axis)",
             anchor="end", color="#d62728")
    svg.text(x0 + 8, y1 + 12, "gray: raw, blue: clean", anchor="start", color="#555")
    return svg.render()


def _chart_speed_rmse(reports: list[SamplingReport]) -> str:
    svg = _Svg("Mean speed per method and speed RMSE vs baseline")
    speeds = [v for r in reports for v in r.mean_speed_kmh.values()]
    rmses = [r.rmse_vs_baseline_kmh for r in reports
             if r.rmse_vs_baseline_kmh is not None]
    y_max = _nice_max(max(speeds + rmses + [1.0]))
    x0, y0, x1, y1 = _axes(svg, y_max, "km/h", "sampling interval (s)")
    n = len(reports)
    slot = (x1 - x0) / n
    xs = [x0 + slot * (i + 0.5) for i in range(n)]
    for i, r in enumerate(reports):
        svg.text(xs[i], y0 + 16, f"{r.interval_s}s")
    for method, color in _COLORS.items():
        pts = [(xs[i], y0 - (y0 - y1) * (r.mean_speed_kmh.get(method, 0.0) / y_max))
               for i, r in enumerate(reports) if method in r.mean_speed_kmh]
        if pts:
            svg.polyline(pts, color)
    bars = [(xs[i], r.rmse_vs_baseline_kmh) for i, r in enumerate(reports)
            if r.rmse_vs_baseline_kmh is not None]
    for cx, v in bars:
        h = (y0 - y1) * v / y_max
        svg.rect(cx - 9, y0 - h, 18, h, "#bbbbbb")
    legend = ", ".join(f"{m}" for m in _COLORS)
    svg.text(x0 + 8, y1 + 12, f"lines: mean speed ({legend}); gray bars: "
             "RMSE vs baseline", anchor="start", color="#555")
    return svg.render()


def _chart_methods(reports: list[MethodReport]) -> str:
    svg = _Svg("Distance and mean speed by coordinate method")
    dists = [v for r in reports for v in r.total_distance_km.values()]
    speeds = [v for r in reports for v in r.mean_speed_kmh.values()]
    y_max = _nice_max(max(dists + [1.0]))
    s_max = _nice_max(max(speeds + [1.0]))
    x0, y0, x1, y1 = _axes(svg, y_max, "km", "sampling interval (s)")
    n = len(reports)
    slot = (x1 - x0) / n
    methods = list(_COLORS)
    for i, r in enumerate(reports):
        cx = x0 + slot * (i + 0.5)
        bw = min(20.0, slot / 5)
        for j, m in enumerate(methods):
            v = r.total_distance_km.get(m, 0.0)
            h = (y0 - y1) * v / y_max
            svg.rect(cx + (j - 1.5) * bw, y0 - h, bw, h, _COLORS[m])
        svg.text(cx, y0 + 16, f"{r.interval_s}s")
    for m in methods:
        pts = [(x0 + slot * (i + 0.5),
                y0 - (y0 - y1) * (r.mean_speed_kmh.get(m, 0.0) / s_max))
               for i, r in enumerate(reports)]
        svg.polyline(pts, _COLORS[m], width=1.0)
    svg.text(x0 + 8, y1 + 12,
             f"bars: distance km (max {y_max:g}); thin lines: mean speed "
             f"(scaled to {s_max:g} km/h)", anchor="start", color="#555")
    return svg.render()


def render_charts(sampling_reports: list[SamplingReport],
                  method_reports: list[MethodReport],
                  out_dir: str | Path) -> list[Path]:
    """Write the three analysis charts; returns the created paths."""
    if not sampling_reports and not method_reports:
        raise NothingToRender("no report data to chart")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if sampling_reports:
        written.append(atomic_write_text(
            out_dir / "sampling_counts.svg", _chart_counts(sampling_reports)))
        written.append(atomic_write_text(
            out_dir / "speed_rmse.svg", _chart_speed_rmse(sampling_reports)))
    if method_reports:
        written.append(atomic_write_text(
            out_dir / "method_comparison.svg", _chart_methods(method_reports)))
    return written
