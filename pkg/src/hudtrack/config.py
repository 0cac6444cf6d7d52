"""Run configuration: one JSON document drives the whole pipeline.

Every CLI flag overrides its config-file counterpart; the effective
config is echoed into the run manifest so a run can be reproduced
byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from . import __version__
from .geodesy import MethodParams
from .imaging import PreprocessParams
from .ocr import RecognizerSpec
from .trajectory import FilterParams

__all__ = ["RunConfig", "load_run_config", "run_manifest"]

DEFAULT_INTERVALS = (1, 5, 10, 15, 20)
EXPORT_FORMATS = ("csv", "kmz", "geojson", "charts", "report")


@dataclass(frozen=True)
class RunConfig:
    frames_dir: str = "frames"
    fps: float = 1.0
    duration_override_s: float | None = None
    roi_config_path: str = "roi_config.json"
    output_dir: str = "out"
    run_id: str = "run"
    intervals: tuple[int, ...] = DEFAULT_INTERVALS
    preprocess: PreprocessParams = field(default_factory=PreprocessParams)
    recognizer: RecognizerSpec = field(default_factory=RecognizerSpec)
    filters: FilterParams = field(default_factory=FilterParams)
    methods: MethodParams = field(default_factory=MethodParams)
    exports: tuple[str, ...] = EXPORT_FORMATS
    workers: int = 1
    dump_preprocessed: bool = False
    revalidate_rejected: bool = False

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if not self.intervals or any(i < 1 or int(i) != i for i in self.intervals):
            raise ValueError("intervals must be positive integers")
        unknown = set(self.exports) - set(EXPORT_FORMATS)
        if unknown:
            raise ValueError(f"unknown export formats: {sorted(unknown)}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def with_overrides(self, **kwargs) -> "RunConfig":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs) if kwargs else self


def _tuple_pair(v) -> tuple[int, int]:
    return (int(v[0]), int(v[1]))


def load_run_config(path: str | Path) -> RunConfig:
    """Parse the JSON run-config document."""
    doc = json.loads(Path(path).read_text())
    kwargs: dict = {}
    for key in ("frames_dir", "fps", "duration_override_s", "roi_config_path",
                "output_dir", "run_id", "workers", "dump_preprocessed",
                "revalidate_rejected"):
        if key in doc:
            kwargs[key] = doc[key]
    if "intervals" in doc:
        kwargs["intervals"] = tuple(int(i) for i in doc["intervals"])
    if "exports" in doc:
        kwargs["exports"] = tuple(doc["exports"])
    if "preprocess" in doc:
        p = dict(doc["preprocess"])
        if "clahe_tiles" in p:
            p["clahe_tiles"] = _tuple_pair(p["clahe_tiles"])
        if "stages_enabled" in p:
            p["stages_enabled"] = tuple(p["stages_enabled"])
        kwargs["preprocess"] = PreprocessParams(**p)
    if "recognizer" in doc:
        r = dict(doc["recognizer"])
        if "command" in r:
            r["command"] = tuple(r["command"])
        kwargs["recognizer"] = RecognizerSpec(**r)
    if "filters" in doc:
        kwargs["filters"] = FilterParams(**doc["filters"])
    if "methods" in doc:
        kwargs["methods"] = MethodParams(**doc["methods"])
    return RunConfig(**kwargs)


def run_manifest(cfg: RunConfig) -> dict:
    """Deterministic echo of everything a rerun needs."""
    doc = asdict(cfg)
    doc["preprocess"]["clahe_tiles"] = list(cfg.preprocess.clahe_tiles)
    doc["preprocess"]["stages_enabled"] = list(cfg.preprocess.stages_enabled)
    doc["recognizer"]["command"] = list(cfg.recognizer.command)
    doc["intervals"] = list(cfg.intervals)
    doc["exports"] = list(cfg.exports)
    return {
        "tool": "hudtrack",
        "version": __version__,
        "constants": {
            "earth_radius_m": cfg.methods.earth_radius_m,
            "meters_per_degree": cfg.methods.meters_per_degree,
            "utm_scale_factor": 0.9996,
            "utm_zone_override": cfg.methods.utm_zone_override,
        },
        "config": doc,
    }
