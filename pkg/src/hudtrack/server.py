"""Local HTTP surface for the browser ROI annotator.

Endpoints (localhost only, single user):
  GET  /api/frames                 index list + frame geometry
  GET  /api/frames/{i}.png         decoded grayscale frame
  GET  /api/roi-config             current RoiConfig document
  PUT  /api/roi-config             validated save; 422 on bad config,
                                   409 on stale version
  GET  /api/preview/{i}.png        frame with current ROIs outlined
  GET  /api/enhanced/{label}/{i}.png  post-enhancement crop for one ROI
  GET  /...                        static files of the annotator SPA
"""

from __future__ import annotations

import json
import logging
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import HudTrackError, ValidationFailed
from .gray import encode_png
from .imaging import PreprocessParams
from .ingest import FrameSource, load_frame
from .roi import (RoiConfig, crop_roi, enhance_roi, load_roi_config,
                  render_preview, roi_config_from_dict, roi_config_to_dict,
                  save_roi_config, validate_config)

logger = logging.getLogger(__name__)

__all__ = ["AnnotatorState", "make_server", "serve_annotator"]

_ENHANCED_RE = re.compile(r"^/api/enhanced/([^/]+)/(\d+)\.png$")
_FRAME_RE = re.compile(r"^/api/frames/(\d+)\.png$")
_PREVIEW_RE = re.compile(r"^/api/preview/(\d+)\.png$")

_MIME = {".html": "text/html", ".js": "text/javascript",
         ".css": "text/css", ".map": "application/json",
         ".svg": "image/svg+xml", ".png": "image/png"}


class AnnotatorState:
    """Shared state behind the endpoints; config writes are serialized."""

    def __init__(self, source: FrameSource, roi_config_path: str | Path,
                 preprocess: PreprocessParams = PreprocessParams(),
                 static_dir: str | Path | None = None):
        self.source = source
        self.roi_config_path = Path(roi_config_path)
        self.preprocess = preprocess
        self.static_dir = Path(static_dir) if static_dir else None
        self._lock = threading.Lock()
        if self.roi_config_path.exists():
            self._config = load_roi_config(self.roi_config_path)
        else:
            first = load_frame(source, 0)
            self._config = RoiConfig(first.width, first.height, (), version=1)

    def get_config(self) -> RoiConfig:
        with self._lock:
            return self._config

    def put_config(self, doc: dict) -> tuple[int, dict]:
        """Returns (http_status, response_body)."""
        try:
            incoming = roi_config_from_dict(doc)
        except ValidationFailed as exc:
            return 422, {"errors": [{"label": "", "code": "Malformed",
                                     "message": str(exc)}]}
        report = validate_config(incoming)
        if not report.ok:
            return 422, report.to_dict()
        with self._lock:
            if incoming.version != self._config.version:
                return 409, {"error": "stale version",
                             "server_version": self._config.version}
            bumped = RoiConfig(incoming.frame_width, incoming.frame_height,
                               incoming.rois, version=incoming.version + 1)
            save_roi_config(bumped, self.roi_config_path)
            self._config = bumped
            return 200, {"version": bumped.version,
                         "warnings": report.warnings}


class _Handler(BaseHTTPRequestHandler):
    state: AnnotatorState  # injected by make_server

    def log_message(self, fmt, *args):  # route through logging, not stderr
        logger.debug("http: " + fmt, *args)

    def _send(self, status: int, content_type: str, body: bytes):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, doc: dict):
        self._send(status, "application/json",
                   json.dumps(doc).encode("utf-8"))

    def do_GET(self):
        try:
            self._route_get()
        except HudTrackError as exc:
            self._send_json(404, {"error": str(exc)})
        except Exception as exc:  # noqa: BLE001 — keep the server alive
            logger.exception("request failed")
            self._send_json(500, {"error": str(exc)})

    def _route_get(self):
        state = self.state
        path = self.path.split("?", 1)[0]
        if path == "/api/frames":
            first = load_frame(state.source, 0)
            self._send_json(200, {
                "frames": list(range(state.source.frame_count)),
                "fps": state.source.fps,
                "width": first.width, "height": first.height})
            return
        m = _FRAME_RE.match(path)
        if m:
            img = load_frame(state.source, int(m.group(1)))
            self._send(200, "image/png", encode_png(img))
            return
        if path == "/api/roi-config":
            self._send_json(200, roi_config_to_dict(state.get_config()))
            return
        m = _PREVIEW_RE.match(path)
        if m:
            frame = load_frame(state.source, int(m.group(1)))
            preview = render_preview(frame, state.get_config())
            self._send(200, "image/png", encode_png(preview))
            return
        m = _ENHANCED_RE.match(path)
        if m:
            label, idx = m.group(1), int(m.group(2))
            spec = state.get_config().find(label)
            if spec is None:
                self._send_json(404, {"error": f"no ROI labeled {label!r}"})
                return
            frame = load_frame(state.source, idx)
            enhanced = enhance_roi(crop_roi(frame, spec), spec.kind,
                                   state.preprocess)
            self._send(200, "image/png", encode_png(enhanced))
            return
        self._serve_static(path)

    def _serve_static(self, path: str):
        state = self.state
        if state.static_dir is None:
            if path == "/":
                self._send(200, "text/html",
                           b"<html><body>annotator frontend not built; see "
                           b"frontend/README notes in the repository"
                           b"</body></html>")
            else:
                self._send_json(404, {"error": "not found"})
            return
        rel = "index.html" if path == "/" else path.lstrip("/")
        target = (state.static_dir / rel).resolve()
        if (not str(target).startswith(str(state.static_dir.resolve()))
                or not target.is_file()):
            self._send_json(404, {"error": "not found"})
            return
        mime = _MIME.get(target.suffix, "application/octet-stream")
        self._send(200, mime, target.read_bytes())

    def do_PUT(self):
        if self.path.split("?", 1)[0] != "/api/roi-config":
            self._send_json(404, {"error": "not found"})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            raw = self.rfile.read(length)
            doc = json.loads(raw)
        except (ValueError, json.JSONDecodeError) as exc:
            self._send_json(422, {"errors": [{"label": "", "code": "Malformed",
                                              "message": str(exc)}]})
            return
        status, body = self.state.put_config(doc)
        self._send_json(status, body)


def make_server(state: AnnotatorState, port: int = 0,
                host: str = "127.0.0.1") -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {"state": state})
    return ThreadingHTTPServer((host, port), handler)


def serve_annotator(state: AnnotatorState, port: int,
                    host: str = "127.0.0.1") -> None:
    """Blocking serve loop; Ctrl-C to stop."""
    server = make_server(state, port, host)
    logger.info("annotator listening on http://%s:%d/",
                host, server.server_address[1])
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
