"""Text recognition and telemetry value parsing.

The builtin recognizer is deterministic template matching against the
embedded font, good enough to close the loop on synthetic footage.  Real
OCR engines plug in through a newline-delimited JSON protocol over a
child process's stdin/stdout (see ``ExternalRecognizer``).
"""

from __future__ import annotations

import base64
import json
import select
import subprocess
from dataclasses import dataclass

import numpy as np

from .errors import (CharInvalid, EmptyText, EngineCrashed, EngineTimeout,
                     ProtocolError, RangeInvalid)
from .font import GlyphTemplateSet, builtin_templates
from .gray import GrayImage, encode_png
from .roi import RoiKind

__all__ = ["OcrReading", "RecognizerSpec", "recognize_builtin",
           "ExternalRecognizer", "parse_value", "VALUE_RANGES"]


@dataclass(frozen=True)
class OcrReading:
    label: str
    raw_text: str
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be within [0, 1]")
        if self.raw_text == "" and self.confidence != 0.0:
            raise ValueError("empty reading must carry zero confidence")


@dataclass(frozen=True)
class RecognizerSpec:
    kind: str = "builtin"  # "builtin" | "external"
    command: tuple[str, ...] = ()
    timeout_ms: int = 10_000
    confidence_floor: float = 0.60

    def __post_init__(self):
        if self.kind not in ("builtin", "external"):
            raise ValueError(f"unknown recognizer kind {self.kind!r}")
        if self.kind == "external":
            if not self.command:
                raise ValueError("external recognizer needs a command line")
            if self.timeout_ms <= 0:
                raise ValueError("timeout_ms must be positive")


def _detect_ink_value(px: np.ndarray) -> int | None:
    """Ink is the minority of the two binary levels; None when blank.

    Direct glyph renders are sparse bright-on-dark; enhanced ROI crops
    come out of adaptive thresholding as sparse dark strokes on a bright
    field.  The minority rule handles both without a polarity flag.
    """
    n_white = int(np.count_nonzero(px == 255))
    n_black = px.size - n_white
    if n_white == 0 or n_black == 0:
        return None
    return 255 if n_white <= n_black else 0


def _nn_resize(mask: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    src_h, src_w = mask.shape
    rows = (np.arange(out_h) * src_h) // out_h
    cols = (np.arange(out_w) * src_w) // out_w
    return mask[rows[:, None], cols[None, :]]


def recognize_builtin(img: GrayImage, templates: GlyphTemplateSet | None = None,
                      label: str = "") -> OcrReading:
    """Segment a binary image into glyphs and match each against templates.

    Glyphs are split by vertical projection (a blank column ends a glyph),
    resized to template dimensions with nearest neighbor, and scored by
    the fraction of agreeing pixels.  Confidence is the mean best score.
    """
    if templates is None:
        templates = builtin_templates()
    px = img.pixels
    uniq = np.unique(px)
    if not set(uniq.tolist()) <= {0, 255}:
        raise ValueError("builtin recognizer expects a binary {0,255} image")
    ink_value = _detect_ink_value(px)
    if ink_value is None:
        return OcrReading(label, "", 0.0)
    ink = px == ink_value

    row_any = ink.any(axis=1)
    col_any = ink.any(axis=0)
    r0, r1 = np.flatnonzero(row_any)[[0, -1]]
    line = ink[r0:r1 + 1, :]
    runs = _column_runs(col_any)

    # pre-crop templates to their ink column extent so narrow glyphs
    # ('.', '1') compare at their natural aspect
    cropped = {}
    for ch, bm in templates.bitmaps.items():
        cols = np.flatnonzero(bm.any(axis=0))
        cropped[ch] = bm[:, cols[0]:cols[-1] + 1] if len(cols) else bm

    chars = []
    scores = []
    for c0, c1 in runs:
        seg = line[:, c0:c1 + 1]
        best_ch, best_score = "", -1.0
        for ch, bm in cropped.items():
            resized = _nn_resize(seg, bm.shape[0], bm.shape[1])
            score = float(np.mean(resized == bm))
            if score > best_score:
                best_ch, best_score = ch, score
        chars.append(best_ch)
        scores.append(best_score)
    return OcrReading(label, "".join(chars), float(np.mean(scores)))


def _column_runs(col_any: np.ndarray) -> list[tuple[int, int]]:
    idx = np.flatnonzero(col_any)
    runs = []
    start = prev = idx[0]
    for c in idx[1:]:
        if c != prev + 1:
            runs.append((start, prev))
            start = c
        prev = c
    runs.append((start, prev))
    return runs


class ExternalRecognizer:
    """Adapter for out-of-process OCR engines.

    Wire protocol, one JSON object per line on the child's stdio:
      request:  {"id": <int>, "kind": "<roi kind>", "image_png_base64": "..."}
      response: {"id": <int>, "text": "...", "confidence": <0..1>}
    Exactly one response per request; ids must match.
    """

    def __init__(self, spec: RecognizerSpec):
        if spec.kind != "external":
            raise ValueError("ExternalRecognizer needs an external spec")
        self.spec = spec
        self._proc: subprocess.Popen | None = None
        self._next_id = 0

    def _ensure_proc(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                list(self.spec.command), stdin=subprocess.PIPE,
                stdout=subprocess.PIPE, text=True, bufsize=1)
        return self._proc

    def recognize(self, img: GrayImage, kind: RoiKind, label: str = "") -> OcrReading:
        proc = self._ensure_proc()
        self._next_id += 1
        req_id = self._next_id
        request = {"id": req_id, "kind": kind.value,
                   "image_png_base64": base64.b64encode(encode_png(img)).decode("ascii")}
        try:
            proc.stdin.write(json.dumps(request) + "\n")
            proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise EngineCrashed(f"engine exited (code {proc.poll()})") from exc

        line = self._read_line(proc)
        try:
            resp = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"engine sent non-JSON line: {line!r}") from exc
        if not isinstance(resp, dict) or "id" not in resp or "text" not in resp:
            raise ProtocolError(f"malformed response: {resp!r}")
        if resp["id"] != req_id:
            raise ProtocolError(f"response id {resp['id']} != request id {req_id}")
        conf = float(resp.get("confidence", 0.0))
        text = str(resp["text"])
        if text == "":
            conf = 0.0
        return OcrReading(label, text, min(max(conf, 0.0), 1.0))

    def _read_line(self, proc: subprocess.Popen) -> str:
        timeout_s = self.spec.timeout_ms / 1000.0
        ready, _, _ = select.select([proc.stdout], [], [], timeout_s)
        if not ready:
            self.close()
            raise EngineTimeout(f"no response within {self.spec.timeout_ms} ms")
        line = proc.stdout.readline()
        if line == "":
            code = proc.poll()
            raise EngineCrashed(f"engine closed stdout (exit code {code})")
        return line

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.kill()
            self._proc.wait()
        self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


# --- value parsing ----------------------------------------------------------

VALUE_RANGES: dict[RoiKind, tuple[float, float]] = {
    RoiKind.LATITUDE: (-90.0, 90.0),
    RoiKind.LONGITUDE: (-180.0, 180.0),
    RoiKind.ALTITUDE: (-500.0, 10_000.0),
    RoiKind.AIRSPEED: (0.0, 500.0),
    # vertical speed is signed (climb/descent); the renderer emits a sign
    RoiKind.VERTICAL_SPEED: (-500.0, 500.0),
    RoiKind.BATTERY: (0.0, 100.0),
    RoiKind.CAPACITY_USED: (0.0, float("inf")),
}

_UNIT_SUFFIXES = ("km/h", "m/s", "mah", "mAh", "m", "%", "v", "V")


def parse_value(kind: RoiKind, raw_text: str, int_digits: int | None = None) -> float:
    """Turn recognized text into a typed telemetry value.

    Coordinate HUDs sometimes omit the decimal point; when none is
    present it is inserted after ``int_digits`` digits (after a leading
    minus sign).
    """
    text = raw_text.strip()
    for suffix in _UNIT_SUFFIXES:
        if text.endswith(suffix) and len(text) > len(suffix):
            text = text[:-len(suffix)].strip()
            break
    if not text:
        raise EmptyText(f"{kind.value}: nothing left after stripping units")
    if any(c not in "0123456789.-" for c in text):
        raise CharInvalid(f"{kind.value}: non-numeric characters in {raw_text!r}")

    if kind.is_coordinate and "." not in text and int_digits is not None:
        sign = ""
        body = text
        if body.startswith("-"):
            sign, body = "-", body[1:]
        if len(body) > int_digits:
            text = f"{sign}{body[:int_digits]}.{body[int_digits:]}"
    try:
        value = float(text)
    except ValueError as exc:
        raise CharInvalid(f"{kind.value}: cannot parse {raw_text!r}") from exc

    lo, hi = VALUE_RANGES.get(kind, (float("-inf"), float("inf")))
    if not lo <= value <= hi:
        raise RangeInvalid(f"{kind.value}: {value} outside [{lo}, {hi}]")
    return value
