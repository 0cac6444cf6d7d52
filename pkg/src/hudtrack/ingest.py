"""Frame sources and temporal sampling.

A frame source is a directory of ``frame_%06d.png`` (or ``.pgm``) files,
or an explicit sorted file list, plus the capture frame rate.  Sampling
picks whole-second timestamps 0, i, 2i, ... up to the clip duration and
maps them to frame indices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FrameMissing, InvalidInterval
from .gray import GrayImage, decode_image

__all__ = ["FrameSource", "SamplingPlan", "plan_sampling", "select_frames", "load_frame"]

_FRAME_RE = re.compile(r"frame_(\d{6})\.(png|pgm)$")


@dataclass(frozen=True)
class FrameSource:
    """An ordered sequence of same-sized frames captured at ``fps``."""

    files: tuple[Path, ...]
    fps: float
    duration_override_s: float | None = None

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if not self.files:
            raise ValueError("frame source needs at least one frame")

    @property
    def frame_count(self) -> int:
        return len(self.files)

    @property
    def duration_s(self) -> float:
        if self.duration_override_s is not None:
            return self.duration_override_s
        return (self.frame_count - 1) / self.fps

    @classmethod
    def from_directory(cls, directory: str | Path, fps: float,
                       duration_override_s: float | None = None) -> "FrameSource":
        directory = Path(directory)
        found = []
        for p in sorted(directory.iterdir()) if directory.is_dir() else []:
            m = _FRAME_RE.search(p.name)
            if m:
                found.append((int(m.group(1)), p))
        if not found:
            raise FrameMissing(f"no frame_NNNNNN.png/.pgm files under {directory}")
        found.sort(key=lambda t: t[0])
        return cls(tuple(p for _, p in found), fps, duration_override_s)


@dataclass(frozen=True)
class SamplingPlan:
    """Whole-second sampling grid: t = 0, interval, 2*interval, ..."""

    interval_s: int
    timestamps: tuple[int, ...]
    frame_indices: tuple[int, ...] = field(default=())


def plan_sampling(duration_s: float, interval_s: int) -> SamplingPlan:
    """Timestamps {k*interval : k >= 0} up to and including duration_s.

    A 121 s clip yields 122/25/13/9/7 timestamps at intervals 1/5/10/15/20.
    """
    if interval_s < 1 or int(interval_s) != interval_s:
        raise InvalidInterval(f"interval must be a positive integer second, got {interval_s}")
    if duration_s < 0:
        raise InvalidInterval(f"duration must be non-negative, got {duration_s}")
    interval_s = int(interval_s)
    n = int(duration_s // interval_s) + 1
    return SamplingPlan(interval_s, tuple(k * interval_s for k in range(n)))


def select_frames(plan: SamplingPlan, fps: float,
                  frame_count: int | None = None) -> tuple[int, ...]:
    """Map plan timestamps to frame indices: round(t*fps), clamped, deduped."""
    if fps <= 0:
        raise ValueError("fps must be positive")
    indices: list[int] = []
    seen: set[int] = set()
    for t in plan.timestamps:
        idx = int(t * fps + 0.5)  # round half up
        if idx < 0:
            idx = 0
        if frame_count is not None and idx > frame_count - 1:
            idx = frame_count - 1
        if idx not in seen:
            seen.add(idx)
            indices.append(idx)
    return tuple(indices)


def load_frame(source: FrameSource, index: int) -> GrayImage:
    """Decode frame ``index`` to grayscale (color reduced by BT.601 luma)."""
    if index < 0 or index >= source.frame_count:
        raise FrameMissing(f"frame index {index} outside [0, {source.frame_count})")
    path = source.files[index]
    if not path.exists():
        raise FrameMissing(str(path))
    return decode_image(path)
