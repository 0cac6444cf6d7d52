"""Command-line entry points.

Subcommands mirror the pipeline stages so each step stays independently
scriptable: ``synth`` makes a dataset, ``pipeline`` runs extraction end
to end, ``roi-preview`` checks a config against a frame, ``compare``
reruns the coordinate-method analysis on an existing track CSV,
``export`` re-serializes a track, ``serve-annotator`` hosts the browser
ROI tool.

Exit codes: 0 success, 1 fatal, 2 partial (some frames unreadable).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .analysis import compare_methods
from .config import RunConfig, load_run_config, run_manifest
from .errors import HudTrackError
from .export import (atomic_write_text, render_charts, write_geojson,
                     write_kmz, write_track_csv)
from .geodesy import GeoPoint
from .gray import encode_png
from .ingest import FrameSource, load_frame
from .ocr import RecognizerSpec
from .pipeline import PipelineFatal, run_pipeline
from .roi import load_roi_config, render_preview, validate_config
from .synth import FlightSimParams, HudStyle, write_synth_dataset

logger = logging.getLogger(__name__)


def _load_config(args) -> RunConfig:
    cfg = load_run_config(args.config) if args.config else RunConfig()
    overrides = {}
    for key in ("frames_dir", "fps", "roi_config_path", "output_dir",
                "run_id", "workers"):
        if getattr(args, key, None) is not None:
            overrides[key] = getattr(args, key)
    if getattr(args, "intervals", None):
        overrides["intervals"] = tuple(args.intervals)
    if getattr(args, "engine_cmd", None):
        overrides["recognizer"] = RecognizerSpec(
            kind="external", command=tuple(args.engine_cmd.split()))
    if getattr(args, "revalidate_rejected", False):
        overrides["revalidate_rejected"] = True
    if getattr(args, "dump_preprocessed", False):
        overrides["dump_preprocessed"] = True
    return cfg.with_overrides(**overrides)


def cmd_synth(args) -> int:
    params = FlightSimParams(seed=args.seed, duration_s=args.duration,
                             start=GeoPoint(args.start_lat, args.start_lon))
    style = HudStyle(font_scale=args.font_scale,
                     noise_sigma=args.noise_sigma, contrast=args.contrast,
                     show_decimal_point=not args.no_decimal_point)
    meta = write_synth_dataset(params, style, args.out)
    print(json.dumps(meta, indent=2))
    return 0


def cmd_pipeline(args) -> int:
    cfg = _load_config(args)
    result = run_pipeline(cfg)
    counts = {i: {"raw": len(result.raw_tracks[i].records),
                  "clean": len(result.clean_tracks[i].records)}
              for i in sorted(result.raw_tracks)}
    print(json.dumps({
        "frames_processed": result.frames_processed,
        "frames_unreadable": result.frames_unreadable,
        "counts": counts,
        "exports": result.exports_written,
    }, indent=2))
    return result.exit_code


def cmd_roi_preview(args) -> int:
    cfg = _load_config(args)
    roi_path = Path(cfg.roi_config_path)
    if not roi_path.exists():
        print(f"roi config not found: {roi_path}", file=sys.stderr)
        return 1
    roi_cfg = load_roi_config(roi_path)
    report = validate_config(roi_cfg)
    print(json.dumps(report.to_dict(), indent=2))
    if not report.ok:
        return 1
    source = FrameSource.from_directory(cfg.frames_dir, cfg.fps)
    frame = load_frame(source, args.frame)
    out = Path(args.out or Path(cfg.output_dir) / f"preview_{args.frame:06d}.png")
    out.parent.mkdir(parents=True, exist_ok=True)
    encode_png(render_preview(frame, roi_cfg), out)
    print(f"wrote {out}")
    return 0


def cmd_serve_annotator(args) -> int:
    from .server import AnnotatorState, serve_annotator
    cfg = _load_config(args)
    source = FrameSource.from_directory(cfg.frames_dir, cfg.fps)
    static_dir = args.static_dir
    if static_dir is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static_dir = bundled if bundled.is_dir() else None
    state = AnnotatorState(source, cfg.roi_config_path, cfg.preprocess,
                           static_dir)
    try:
        serve_annotator(state, args.port)
    except OSError as exc:
        print(f"cannot bind port {args.port}: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_compare(args) -> int:
    from .export import read_track_csv
    cfg = _load_config(args)
    track = read_track_csv(args.track)
    intervals = list(args.intervals or cfg.intervals)
    reports = compare_methods(track, intervals, cfg.methods)
    out_dir = Path(args.out or cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = {"manifest": run_manifest(cfg),
           "methods": [r.to_dict() for r in reports]}
    path = atomic_write_text(out_dir / "method_report.json",
                             json.dumps(doc, sort_keys=True, indent=1) + "\n")
    charts = render_charts([], reports, out_dir / "charts")
    print(json.dumps({"report": str(path),
                      "charts": [str(c) for c in charts]}, indent=2))
    return 0


def cmd_export(args) -> int:
    from .export import read_track_csv
    track = read_track_csv(args.track)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    formats = args.formats.split(",")
    written = []
    if "csv" in formats:
        written.append(write_track_csv(track, out_dir / "track.csv"))
    if "kmz" in formats:
        written.append(write_kmz(track, out_dir / "track.kmz", name=args.name))
    if "geojson" in formats:
        written.append(write_geojson(track, out_dir / "track.geojson"))
    print(json.dumps({"written": [str(w) for w in written]}, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hudtrack",
        description="Extract, filter and analyze drone telemetry from "
                    "FPV HUD video frames.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic HUD dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration", type=int, default=121)
    p.add_argument("--start-lat", type=float, default=47.05)
    p.add_argument("--start-lon", type=float, default=15.45)
    p.add_argument("--font-scale", type=int, default=2)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--contrast", type=float, default=1.0)
    p.add_argument("--no-decimal-point", action="store_true",
                   help="render coordinates without the decimal point")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("pipeline", help="run the full extraction pipeline")
    _add_common(p)
    p.add_argument("--intervals", type=int, nargs="+")
    p.add_argument("--workers", type=int)
    p.add_argument("--engine-cmd",
                   help="external recognizer command line (JSONL protocol)")
    p.add_argument("--revalidate-rejected", action="store_true",
                   help="give stage-1 rejects a second chance in stage 2")
    p.add_argument("--dump-preprocessed", action="store_true",
                   help="write frame-level preprocessed images")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("roi-preview", help="render ROI overlays on a frame")
    _add_common(p)
    p.add_argument("--frame", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_roi_preview)

    p = sub.add_parser("serve-annotator", help="serve the browser ROI tool")
    _add_common(p)
    p.add_argument("--port", type=int, default=8654)
    p.add_argument("--static-dir",
                   help="annotator SPA build directory (default frontend/dist)")
    p.set_defaults(func=cmd_serve_annotator)

    p = sub.add_parser("compare", help="coordinate-method comparison on a track CSV")
    _add_common(p)
    p.add_argument("--track", required=True, help="telemetry CSV path")
    p.add_argument("--intervals", type=int, nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("export", help="re-serialize a track CSV")
    p.add_argument("--track", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--formats", default="csv,kmz,geojson")
    p.add_argument("--name", default="flight")
    p.set_defaults(func=cmd_export)
    return parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run-config path")
    p.add_argument("--frames", dest="frames_dir")
    p.add_argument("--fps", type=float)
    p.add_argument("--roi-config", dest="roi_config_path")
    p.add_argument("--out-dir", dest="output_dir")
    p.add_argument("--run-id", dest="run_id")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PipelineFatal as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return 1
    except HudTrackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
