"""End-to-end orchestration: frames in, reports and exports out.

Per-frame work (crop, enhance, recognize, parse) is pure, so frames can
fan out across worker processes; results are reduced in frame order and
every downstream artifact is deterministic regardless of worker count.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path

from .analysis import (MethodReport, SamplingReport, compare_methods,
                       sampling_experiment)
from .config import RunConfig, run_manifest
from .errors import EmptyTrack, HudTrackError, ParseError
from .export import (atomic_write_text, render_charts, write_geojson,
                     write_kmz, write_track_csv)
from .gray import decode_image, encode_png
from .imaging import apply_frame_stages
from .ingest import FrameSource, load_frame, plan_sampling, select_frames
from .ocr import ExternalRecognizer, parse_value, recognize_builtin
from .roi import (RoiKind, crop_roi, enhance_roi, load_roi_config,
                  validate_config)
from .trajectory import FlightTrack, assemble_track, two_stage_filter

logger = logging.getLogger(__name__)

__all__ = ["PipelineResult", "PipelineFatal", "run_pipeline", "extract_frame_fields"]

_FIELD_NAMES = {
    RoiKind.LATITUDE: "lat",
    RoiKind.LONGITUDE: "lon",
    RoiKind.ALTITUDE: "altitude",
    RoiKind.AIRSPEED: "airspeed",
    RoiKind.VERTICAL_SPEED: "vspeed",
    RoiKind.BATTERY: "battery",
    RoiKind.CAPACITY_USED: "capacity_used",
}


class PipelineFatal(HudTrackError):
    """No track can be produced; maps to exit code 1."""


@dataclass
class PipelineResult:
    raw_tracks: dict[int, FlightTrack]
    clean_tracks: dict[int, FlightTrack]
    sampling_reports: list[SamplingReport]
    method_reports: list[MethodReport]
    drop_reports: dict[int, list[dict]]
    removal_counts: dict[int, dict[str, int]]
    frames_processed: int
    frames_unreadable: int
    exports_written: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 2 if self.frames_unreadable else 0


# module-level engine cache: one external process per worker
_ENGINE: ExternalRecognizer | None = None


def _get_engine(spec) -> ExternalRecognizer:
    global _ENGINE
    if _ENGINE is None or _ENGINE.spec != spec:
        _ENGINE = ExternalRecognizer(spec)
    return _ENGINE


def extract_frame_fields(args) -> tuple[int, dict]:
    """Worker: one frame -> {field_name: (value|None, status)}.

    Module-level so it can cross a process boundary; ``args`` packs
    (frame_index, frame_path, rois, preprocess, recognizer).
    """
    frame_index, frame_path, rois, preprocess, recognizer = args
    frame = decode_image(frame_path)
    fields: dict[str, tuple[float | None, str]] = {}
    for spec in rois:
        name = _FIELD_NAMES.get(spec.kind)
        if name is None:
            continue
        try:
            crop = crop_roi(frame, spec)
            enhanced = enhance_roi(crop, spec.kind, preprocess)
            if recognizer.kind == "builtin":
                reading = recognize_builtin(enhanced, label=spec.label)
            else:
                reading = _get_engine(recognizer).recognize(
                    enhanced, spec.kind, spec.label)
            if reading.confidence < recognizer.confidence_floor:
                fields[name] = (None, "low_confidence")
                continue
            value = parse_value(spec.kind, reading.raw_text, spec.int_digits)
            fields[name] = (value, "ok")
        except ParseError as exc:
            fields[name] = (None, exc.code)
        except HudTrackError as exc:
            fields[name] = (None, f"error:{type(exc).__name__}")
    return frame_index, fields


def _base_interval(intervals: tuple[int, ...]) -> int:
    return reduce(math.gcd, intervals)


def run_pipeline(cfg: RunConfig) -> PipelineResult:
    """Ingest -> enhance -> recognize -> assemble -> filter -> analyze -> export."""
    frames_dir = Path(cfg.frames_dir)
    roi_path = Path(cfg.roi_config_path)
    if not roi_path.exists():
        raise PipelineFatal(f"roi config not found: {roi_path}")
    roi_cfg = load_roi_config(roi_path)
    report = validate_config(roi_cfg)
    if not report.ok:
        raise PipelineFatal(f"roi config invalid: {json.dumps(report.errors)}")
    has_coords = (any(s.kind is RoiKind.LATITUDE for s in roi_cfg.rois)
                  and any(s.kind is RoiKind.LONGITUDE for s in roi_cfg.rois))
    if not has_coords:
        raise PipelineFatal("config lacks latitude/longitude ROIs; "
                            "no track can be extracted")

    source = FrameSource.from_directory(frames_dir, cfg.fps,
                                        cfg.duration_override_s)
    base = _base_interval(cfg.intervals)
    base_plan = plan_sampling(source.duration_s, base)
    base_indices = select_frames(base_plan, cfg.fps, source.frame_count)
    time_of = dict(zip(base_indices, base_plan.timestamps))

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    work = [(i, str(source.files[i]), roi_cfg.rois, cfg.preprocess, cfg.recognizer)
            for i in base_indices]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(extract_frame_fields, work, chunksize=4))
    else:
        results = [extract_frame_fields(w) for w in work]
    results.sort(key=lambda r: r[0])

    if cfg.dump_preprocessed:
        dump_dir = out_dir / "preprocessed"
        dump_dir.mkdir(exist_ok=True)
        for i in base_indices:
            staged = apply_frame_stages(load_frame(source, i), cfg.preprocess)
            encode_png(staged, dump_dir / f"frame_{i:06d}.png")

    frame_values = [(idx, float(time_of[idx]), fields)
                    for idx, fields in results]
    unreadable = sum(
        1 for _, fields in results
        if fields.get("lat", (None, ""))[1] != "ok"
        or fields.get("lon", (None, ""))[1] != "ok")

    raw_tracks: dict[int, FlightTrack] = {}
    clean_tracks: dict[int, FlightTrack] = {}
    drop_reports: dict[int, list[dict]] = {}
    removal_counts: dict[int, dict[str, int]] = {}
    for interval in sorted(set(cfg.intervals)):
        subset = [fv for fv in frame_values if fv[1] % interval == 0]
        try:
            raw, drops = assemble_track(subset)
            clean, rem1, rem2 = two_stage_filter(
                raw, cfg.filters, cfg.revalidate_rejected)
        except EmptyTrack as exc:
            if interval == base:
                raise PipelineFatal(f"no usable records: {exc}") from exc
            logger.warning("interval %ss produced no usable track: %s",
                           interval, exc)
            continue
        raw_tracks[interval] = raw
        clean_tracks[interval] = clean
        drop_reports[interval] = drops.to_list()
        removal_counts[interval] = {
            "stage1_median": len(rem1), "stage2_buffer": len(rem2),
            "stage1_indices": [r.frame_index for r in rem1],
            "stage2_indices": [r.frame_index for r in rem2]}

    sampling_reports = sampling_experiment(
        raw_tracks, clean_tracks, cfg.methods, baseline_interval=base)
    method_intervals = [i for i in sorted(set(cfg.intervals)) if i % base == 0]
    method_reports = compare_methods(clean_tracks[base], method_intervals,
                                     cfg.methods)

    result = PipelineResult(
        raw_tracks=raw_tracks, clean_tracks=clean_tracks,
        sampling_reports=sampling_reports, method_reports=method_reports,
        drop_reports=drop_reports, removal_counts=removal_counts,
        frames_processed=len(results), frames_unreadable=unreadable)
    _write_exports(cfg, result, out_dir)
    return result


def _write_exports(cfg: RunConfig, result: PipelineResult, out_dir: Path) -> None:
    base = _base_interval(cfg.intervals)
    track = result.clean_tracks[base]
    written: list[str] = []
    if "csv" in cfg.exports:
        written.append(str(write_track_csv(track, out_dir / "track.csv")))
    if "kmz" in cfg.exports and len(track.records) >= 2:
        written.append(str(write_kmz(track, out_dir / "track.kmz",
                                     name=cfg.run_id)))
    if "geojson" in cfg.exports:
        written.append(str(write_geojson(track, out_dir / "track.geojson")))
    if "charts" in cfg.exports:
        written.extend(str(p) for p in render_charts(
            result.sampling_reports, result.method_reports, out_dir / "charts"))
    if "report" in cfg.exports:
        report = {
            "manifest": run_manifest(cfg),
            "frames_processed": result.frames_processed,
            "frames_unreadable": result.frames_unreadable,
            "sampling": [r.to_dict() for r in result.sampling_reports],
            "methods": [r.to_dict() for r in result.method_reports],
            "drops": result.drop_reports,
            "removals": result.removal_counts,
        }
        written.append(str(atomic_write_text(
            out_dir / "run_report.json",
            json.dumps(report, sort_keys=True, indent=1) + "\n")))
    written.append(str(atomic_write_text(
        out_dir / "manifest.json",
        json.dumps(run_manifest(cfg), sort_keys=True, indent=1) + "\n")))
    result.exports_written = written
