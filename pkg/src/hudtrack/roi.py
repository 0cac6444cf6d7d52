"""HUD regions of interest: model, validation, cropping, enhancement, preview.

ROI rectangles are defined on the original (un-preprocessed) frame.
Enhancement crops the original grayscale frame and runs the per-class
chain; coordinate fields get the heavy treatment, everything else the
light one.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import imaging
from .errors import OutOfBounds, ValidationFailed
from .font import render_text_bitmap
from .gray import GrayImage
from .imaging import PreprocessParams

logger = logging.getLogger(__name__)

__all__ = ["RoiKind", "RoiSpec", "RoiConfig", "ValidationReport",
           "validate_config", "crop_roi", "enhance_roi", "enhanced_size",
           "render_preview", "load_roi_config", "save_roi_config"]


class RoiKind(enum.Enum):
    LATITUDE = "latitude"
    LONGITUDE = "longitude"
    ALTITUDE = "altitude"
    BATTERY = "battery"
    AIRSPEED = "airspeed"
    VERTICAL_SPEED = "vertical_speed"
    CAPACITY_USED = "capacity_used"
    AUXILIARY = "auxiliary"

    @property
    def is_coordinate(self) -> bool:
        return self in (RoiKind.LATITUDE, RoiKind.LONGITUDE)


@dataclass(frozen=True)
class RoiSpec:
    """One labeled rectangle locating a HUD field (x, y, w, h in frame px)."""

    label: str
    kind: RoiKind
    rect: tuple[int, int, int, int]
    int_digits: int | None = None  # coordinate kinds: digits before the decimal


@dataclass(frozen=True)
class RoiConfig:
    frame_width: int
    frame_height: int
    rois: tuple[RoiSpec, ...] = ()
    version: int = 1

    def find(self, label: str) -> RoiSpec | None:
        for spec in self.rois:
            if spec.label == label:
                return spec
        return None


@dataclass
class ValidationReport:
    errors: list[dict] = field(default_factory=list)
    warnings: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {"ok": self.ok, "errors": self.errors, "warnings": self.warnings}


def validate_config(cfg: RoiConfig) -> ValidationReport:
    """Structural checks; returns a report instead of raising."""
    report = ValidationReport()
    seen: set[str] = set()
    coord_counts = {RoiKind.LATITUDE: 0, RoiKind.LONGITUDE: 0}
    for spec in cfg.rois:
        x, y, w, h = spec.rect
        if w < 1 or h < 1:
            report.errors.append(
                {"label": spec.label, "code": "EmptyRect",
                 "message": f"rect {spec.rect} has non-positive size"})
        elif x < 0 or y < 0 or x + w > cfg.frame_width or y + h > cfg.frame_height:
            report.errors.append(
                {"label": spec.label, "code": "OutOfBounds",
                 "message": f"rect {spec.rect} exceeds frame "
                            f"{cfg.frame_width}x{cfg.frame_height}"})
        if spec.label in seen:
            report.errors.append(
                {"label": spec.label, "code": "DuplicateLabel",
                 "message": f"label {spec.label!r} used more than once"})
        seen.add(spec.label)
        if spec.kind in coord_counts:
            coord_counts[spec.kind] += 1
            if spec.int_digits is None:
                report.errors.append(
                    {"label": spec.label, "code": "MissingIntDigits",
                     "message": "coordinate ROIs need int_digits"})
            elif spec.int_digits < 1:
                report.errors.append(
                    {"label": spec.label, "code": "BadIntDigits",
                     "message": f"int_digits must be >= 1, got {spec.int_digits}"})
    for kind, n in coord_counts.items():
        if n > 1:
            report.errors.append(
                {"label": "", "code": "DuplicateKind",
                 "message": f"at most one {kind.value} ROI allowed, found {n}"})
    if coord_counts[RoiKind.LATITUDE] == 0 or coord_counts[RoiKind.LONGITUDE] == 0:
        report.warnings.append(
            {"label": "", "code": "NoCoordinateRois",
             "message": "no latitude/longitude ROIs; spatial analysis disabled"})
    return report


def crop_roi(frame: GrayImage, spec: RoiSpec) -> GrayImage:
    x, y, w, h = spec.rect
    if w < 1 or h < 1 or x < 0 or y < 0 or x + w > frame.width or y + h > frame.height:
        raise OutOfBounds(f"roi {spec.label!r} rect {spec.rect} outside "
                          f"{frame.width}x{frame.height} frame")
    return GrayImage(frame.pixels[y:y + h, x:x + w])


def _class_constants(kind: RoiKind, params: PreprocessParams) -> tuple[int, int, float]:
    if kind.is_coordinate:
        return params.coord_pad, params.coord_scale, params.effective_coord_clip
    return params.aux_pad, params.aux_scale, params.aux_clip


def enhanced_size(rect_w: int, rect_h: int, kind: RoiKind,
                  params: PreprocessParams) -> tuple[int, int]:
    """Output dimensions of enhance_roi: (w + 2*pad)*scale x (h + 2*pad)*scale."""
    pad, scale, _ = _class_constants(kind, params)
    return ((rect_w + 2 * pad) * scale, (rect_h + 2 * pad) * scale)


def enhance_roi(img: GrayImage, kind: RoiKind, params: PreprocessParams) -> GrayImage:
    """Per-class enhancement chain: pad -> upscale -> CLAHE -> threshold.

    CLAHE runs single-tile here: a cropped field is one context region,
    and tile gradients inside a small crop destabilize the binarization.
    """
    pad, scale, clip = _class_constants(kind, params)
    out = imaging.pad_border(img, pad, fill="auto")
    out = imaging.upscale(out, scale)
    out = imaging.clahe(out, clip, (1, 1))
    out = imaging.adaptive_threshold(out, params.threshold_block, params.threshold_bias)
    return out


def render_preview(frame: GrayImage, cfg: RoiConfig) -> GrayImage:
    """Frame copy with 2 px rect outlines and bitmap-font labels."""
    report = validate_config(cfg)
    if not report.ok:
        raise ValidationFailed(json.dumps(report.errors))
    px = frame.pixels.copy()
    h, w = px.shape
    for spec in cfg.rois:
        x, y, rw, rh = spec.rect
        x2, y2 = x + rw, y + rh
        for t in range(2):
            xi0, yi0 = min(x + t, w - 1), min(y + t, h - 1)
            xi1, yi1 = max(x2 - 1 - t, 0), max(y2 - 1 - t, 0)
            px[yi0, x:x2] = 255
            px[yi1, x:x2] = 255
            px[y:y2, xi0] = 255
            px[y:y2, xi1] = 255
        _draw_label(px, spec.label, x, y)
    return GrayImage(px)


def _draw_label(px: np.ndarray, label: str, x: int, y: int) -> None:
    bitmap = render_text_bitmap(label.upper())
    lh, lw = bitmap.shape
    ly = y - lh - 2
    if ly < 0:
        ly = y + 2
    lx = max(0, min(x, px.shape[1] - lw))
    lh = min(lh, px.shape[0] - ly)
    lw = min(lw, px.shape[1] - lx)
    if lh <= 0 or lw <= 0:
        return
    region = px[ly:ly + lh, lx:lx + lw]
    region[bitmap[:lh, :lw]] = 255


# --- persistence ------------------------------------------------------------
# JSON schema (documented in the README):
# {"version": int, "frame_width": int, "frame_height": int,
#  "rois": [{"label": str, "kind": str, "rect": [x, y, w, h],
#            "int_digits": int | null}]}

def roi_config_to_dict(cfg: RoiConfig) -> dict:
    return {
        "version": cfg.version,
        "frame_width": cfg.frame_width,
        "frame_height": cfg.frame_height,
        "rois": [
            {"label": s.label, "kind": s.kind.value,
             "rect": list(s.rect), "int_digits": s.int_digits}
            for s in cfg.rois
        ],
    }


def roi_config_from_dict(doc: dict) -> RoiConfig:
    try:
        rois = tuple(
            RoiSpec(label=str(r["label"]), kind=RoiKind(r["kind"]),
                    rect=tuple(int(v) for v in r["rect"]),
                    int_digits=None if r.get("int_digits") is None
                    else int(r["int_digits"]))
            for r in doc.get("rois", ())
        )
        return RoiConfig(frame_width=int(doc["frame_width"]),
                         frame_height=int(doc["frame_height"]),
                         rois=rois, version=int(doc.get("version", 1)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationFailed(f"malformed roi config: {exc}") from exc


def save_roi_config(cfg: RoiConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(roi_config_to_dict(cfg), indent=2) + "\n")


def load_roi_config(path: str | Path) -> RoiConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationFailed(f"{path}: invalid JSON: {exc}") from exc
    return roi_config_from_dict(doc)
