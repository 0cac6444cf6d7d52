"""Synthetic flights and HUD frames for closed-loop testing.

A simulated flight is deterministic in its seed: heading and speed do a
bounded random walk, positions integrate by exact great-circle stepping
(so Haversine segment speeds reproduce the commanded speeds), altitude
drifts smoothly, and vertical speed is the altitude delta by
construction.  Frames render the telemetry with the embedded font, so a
zero-noise render/extract round trip recovers every displayed value.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import LayoutError
from .font import render_text_bitmap
from .geodesy import GeoPoint, destination_point
from .gray import GrayImage, encode_png
from .roi import RoiConfig, RoiKind, RoiSpec, save_roi_config
from .trajectory import FlightTrack, TelemetryRecord

__all__ = ["FlightSimParams", "HudStyle", "simulate_flight", "render_hud",
           "corrupt", "write_synth_dataset", "format_field"]


@dataclass(frozen=True)
class FlightSimParams:
    seed: int = 0
    duration_s: int = 121
    start: GeoPoint = field(default_factory=lambda: GeoPoint(47.05, 15.45))
    speed_min_kmh: float = 40.0
    speed_max_kmh: float = 80.0
    alt_min_m: float = 1200.0
    alt_max_m: float = 1600.0
    heading_volatility_deg: float = 25.0
    battery_start_pct: float = 98.0
    battery_end_pct: float = 62.0
    capacity_end_mah: float = 1150.0

    def __post_init__(self):
        if self.duration_s < 2:
            raise ValueError("duration must be >= 2 s")
        if not 0 < self.speed_min_kmh <= self.speed_max_kmh <= 500.0:
            raise ValueError("speed bounds must satisfy 0 < min <= max <= 500")
        if self.alt_min_m > self.alt_max_m:
            raise ValueError("altitude bounds inverted")


def simulate_flight(p: FlightSimParams) -> FlightTrack:
    """Ground-truth 1 Hz track, deterministic per seed."""
    rng = np.random.default_rng(p.seed)
    n = p.duration_s + 1
    heading = float(rng.uniform(0.0, 360.0))
    speed = float(rng.uniform(p.speed_min_kmh, p.speed_max_kmh))
    speed_sigma = max(0.0, (p.speed_max_kmh - p.speed_min_kmh) / 20.0)

    alts = _smooth_profile(rng, n, p.alt_min_m, p.alt_max_m)
    batteries = np.linspace(p.battery_start_pct, p.battery_end_pct, n)
    capacities = np.linspace(0.0, p.capacity_end_mah, n)

    records = []
    pos = p.start
    for i in range(n):
        vspeed = (alts[i + 1] - alts[i]) if i + 1 < n else 0.0
        records.append(TelemetryRecord(
            t=float(i), lat=pos.lat, lon=pos.lon, frame_index=i,
            altitude=float(alts[i]), airspeed=speed, vspeed=float(vspeed),
            battery=float(batteries[i]), capacity_used=float(capacities[i]),
            field_status=(("lat", "ok"), ("lon", "ok"))))
        if i + 1 < n:
            pos = destination_point(pos, heading, speed / 3.6)
            heading = (heading + float(rng.normal(0.0, p.heading_volatility_deg))) % 360.0
            speed = float(np.clip(speed + rng.normal(0.0, speed_sigma),
                                  p.speed_min_kmh, p.speed_max_kmh))
    return FlightTrack(tuple(records))


def _smooth_profile(rng: np.random.Generator, n: int, lo: float, hi: float
                    ) -> np.ndarray:
    """Momentum random walk clipped to [lo, hi]; length n+1 so the last
    record still has a next-altitude to difference against."""
    mid = (lo + hi) / 2.0
    span = max(hi - lo, 1e-9)
    values = [mid]
    velocity = 0.0
    for _ in range(n):
        velocity = 0.9 * velocity + float(rng.normal(0.0, span / 80.0))
        nxt = float(np.clip(values[-1] + velocity, lo, hi))
        velocity = nxt - values[-1]
        values.append(nxt)
    return np.array(values)


# --- HUD rendering ----------------------------------------------------------

_DEFAULT_ANCHORS: dict[RoiKind, tuple[int, int]] = {
    RoiKind.LATITUDE: (24, 20),
    RoiKind.LONGITUDE: (24, 52),
    RoiKind.ALTITUDE: (24, 84),
    RoiKind.AIRSPEED: (470, 20),
    RoiKind.VERTICAL_SPEED: (470, 52),
    RoiKind.BATTERY: (470, 84),
    RoiKind.CAPACITY_USED: (470, 116),
}

_DEFAULT_LABELS: dict[RoiKind, str] = {
    RoiKind.LATITUDE: "lat",
    RoiKind.LONGITUDE: "lon",
    RoiKind.ALTITUDE: "alt",
    RoiKind.AIRSPEED: "airspeed",
    RoiKind.VERTICAL_SPEED: "vspeed",
    RoiKind.BATTERY: "battery",
    RoiKind.CAPACITY_USED: "capacity",
}


@dataclass(frozen=True)
class HudStyle:
    """Synthetic HUD appearance: dark glyphs over a brighter field."""

    frame_width: int = 640
    frame_height: int = 360
    font_scale: int = 2
    foreground: int = 30
    background: int = 215
    noise_sigma: float = 0.0
    contrast: float = 1.0
    show_decimal_point: bool = True
    anchors: tuple[tuple[RoiKind, tuple[int, int]], ...] = tuple(
        _DEFAULT_ANCHORS.items())

    def __post_init__(self):
        if self.foreground == self.background:
            raise ValueError("foreground and background must differ")
        if self.font_scale < 1:
            raise ValueError("font_scale must be >= 1")

    @property
    def anchor_map(self) -> dict[RoiKind, tuple[int, int]]:
        return dict(self.anchors)


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def format_field(kind: RoiKind, rec: TelemetryRecord,
                 show_decimal_point: bool = True) -> str | None:
    """Display string for one HUD field, or None when absent."""
    if kind is RoiKind.LATITUDE:
        text = f"{rec.lat:.6f}"
    elif kind is RoiKind.LONGITUDE:
        text = f"{rec.lon:.6f}"
    elif kind is RoiKind.ALTITUDE:
        if rec.altitude is None:
            return None
        text = f"{_round_half_up(rec.altitude)}m"
    elif kind is RoiKind.AIRSPEED:
        if rec.airspeed is None:
            return None
        text = f"{_round_half_up(rec.airspeed)}km/h"
    elif kind is RoiKind.VERTICAL_SPEED:
        if rec.vspeed is None:
            return None
        text = f"{rec.vspeed:.1f}"
    elif kind is RoiKind.BATTERY:
        if rec.battery is None:
            return None
        text = f"{_round_half_up(rec.battery)}%"
    elif kind is RoiKind.CAPACITY_USED:
        if rec.capacity_used is None:
            return None
        text = f"{_round_half_up(rec.capacity_used)}"
    else:
        return None
    if kind.is_coordinate and not show_decimal_point:
        text = text.replace(".", "")
    return text


def _int_digits(value: float) -> int:
    return max(1, len(str(abs(int(value)))))


def render_hud(rec: TelemetryRecord, style: HudStyle = HudStyle()
               ) -> tuple[GrayImage, RoiConfig]:
    """Render one frame; returns it with the exact per-field ROI rects.

    Rects wrap the glyphs plus a one-cell background margin, the way a
    human draws them; a margin-free box would put glyph ink on the crop
    boundary and bias the auto pad fill toward the foreground.
    """
    frame = np.full((style.frame_height, style.frame_width),
                    style.background, dtype=np.uint8)
    margin = style.font_scale
    rois = []
    for kind, (x, y) in style.anchor_map.items():
        text = format_field(kind, rec, style.show_decimal_point)
        if text is None:
            continue
        bitmap = render_text_bitmap(text, style.font_scale)
        h, w = bitmap.shape
        if (x - margin < 0 or y - margin < 0
                or x + w + margin > style.frame_width
                or y + h + margin > style.frame_height):
            raise LayoutError(
                f"{kind.value} text {text!r} ({w}x{h}) overflows at ({x}, {y})")
        region = frame[y:y + h, x:x + w]
        region[bitmap] = style.foreground
        int_digits = None
        if kind.is_coordinate:
            int_digits = _int_digits(rec.lat if kind is RoiKind.LATITUDE else rec.lon)
        rois.append(RoiSpec(label=_DEFAULT_LABELS[kind], kind=kind,
                            rect=(x - margin, y - margin,
                                  w + 2 * margin, h + 2 * margin),
                            int_digits=int_digits))
    cfg = RoiConfig(frame_width=style.frame_width, frame_height=style.frame_height,
                    rois=tuple(rois), version=1)
    return GrayImage(frame), cfg


def corrupt(img: GrayImage, noise_sigma: float, contrast: float,
            seed: int) -> GrayImage:
    """Contrast stretch about mid-gray plus Gaussian pixel noise."""
    if noise_sigma < 0:
        raise ValueError("noise sigma must be >= 0")
    if contrast <= 0:
        raise ValueError("contrast must be positive")
    if noise_sigma == 0.0 and contrast == 1.0:
        return img
    rng = np.random.default_rng(seed)
    px = img.pixels.astype(np.float64)
    out = (px - 128.0) * contrast + 128.0
    if noise_sigma > 0.0:
        out = out + rng.normal(0.0, noise_sigma, size=px.shape)
    return GrayImage(np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8))


def merged_roi_config(configs: list[RoiConfig]) -> RoiConfig:
    """Per-label union of rects so one config covers every frame.

    Field text width varies over a flight (sign flips, digit count);
    the merged rect anchors at the common top-left and spans the widest
    rendering seen.
    """
    if not configs:
        raise ValueError("no configs to merge")
    by_label: dict[str, list[RoiSpec]] = {}
    for cfg in configs:
        for spec in cfg.rois:
            by_label.setdefault(spec.label, []).append(spec)
    merged = []
    for label, specs in by_label.items():
        xs = [s.rect[0] for s in specs]
        ys = [s.rect[1] for s in specs]
        x2 = max(s.rect[0] + s.rect[2] for s in specs)
        y2 = max(s.rect[1] + s.rect[3] for s in specs)
        int_digits = max((s.int_digits for s in specs
                          if s.int_digits is not None), default=None)
        merged.append(RoiSpec(label=label, kind=specs[0].kind,
                              rect=(min(xs), min(ys), x2 - min(xs), y2 - min(ys)),
                              int_digits=int_digits))
    first = configs[0]
    order = {spec.label: i for i, spec in enumerate(first.rois)}
    merged.sort(key=lambda s: order.get(s.label, len(order)))
    return RoiConfig(first.frame_width, first.frame_height, tuple(merged), 1)


def write_synth_dataset(params: FlightSimParams, style: HudStyle,
                        out_dir: str | Path) -> dict:
    """Materialize a synthetic dataset: frames, truth CSV, ROI config.

    Layout: ``frames/frame_%06d.png`` at 1 fps, ``ground_truth.csv`` in
    the telemetry CSV schema, ``roi_config.json``, ``dataset.json``.
    """
    from .export import write_track_csv  # local import to avoid a cycle

    out_dir = Path(out_dir)
    frames_dir = out_dir / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)
    track = simulate_flight(params)
    configs = []
    for rec in track.records:
        frame, cfg = render_hud(rec, style)
        if style.noise_sigma > 0.0 or style.contrast != 1.0:
            frame = corrupt(frame, style.noise_sigma, style.contrast,
                            seed=params.seed * 100_003 + rec.frame_index)
        encode_png(frame, frames_dir / f"frame_{rec.frame_index:06d}.png")
        configs.append(cfg)
    merged = merged_roi_config(configs)
    save_roi_config(merged, out_dir / "roi_config.json")
    write_track_csv(track, out_dir / "ground_truth.csv")
    meta = {
        "fps": 1.0,
        "duration_s": params.duration_s,
        "frame_count": len(track.records),
        "seed": params.seed,
        "frames_dir": "frames",
        "roi_config": "roi_config.json",
        "ground_truth": "ground_truth.csv",
    }
    (out_dir / "dataset.json").write_text(json.dumps(meta, indent=2) + "\n")
    return meta
