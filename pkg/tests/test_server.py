import io
import json
import threading
import urllib.error
import urllib.request

import pytest
from PIL import Image

from hudtrack.imaging import PreprocessParams
from hudtrack.ingest import FrameSource
from hudtrack.server import AnnotatorState, make_server
from hudtrack.synth import FlightSimParams, HudStyle, write_synth_dataset


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("annds")
    write_synth_dataset(FlightSimParams(seed=8, duration_s=4), HudStyle(), root)
    return root


@pytest.fixture()
def server(dataset, tmp_path):
    roi_path = tmp_path / "roi_config.json"
    source = FrameSource.from_directory(dataset / "frames", fps=1.0)
    state = AnnotatorState(source, roi_path, PreprocessParams())
    srv = make_server(state, port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{srv.server_address[1]}"
    yield base, roi_path
    srv.shutdown()
    srv.server_close()
    thread.join(timeout=5)


def get(url):
    with urllib.request.urlopen(url, timeout=10) as resp:
        return resp.status, resp.read(), resp.headers.get("Content-Type")


def put_json(url, doc):
    req = urllib.request.Request(
        url, data=json.dumps(doc).encode(), method="PUT",
        headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=10) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read())


def three_rois(version=1):
    return {
        "version": version, "frame_width": 640, "frame_height": 360,
        "rois": [
            {"label": "lat", "kind": "latitude",
             "rect": [22, 18, 110, 18], "int_digits": 2},
            {"label": "lon", "kind": "longitude",
             "rect": [22, 50, 110, 18], "int_digits": 2},
            {"label": "alt", "kind": "altitude",
             "rect": [22, 82, 64, 18], "int_digits": None},
        ],
    }


class TestFramesApi:
    def test_frame_index_list(self, server):
        base, _ = server
        status, body, ctype = get(f"{base}/api/frames")
        assert status == 200 and ctype == "application/json"
        doc = json.loads(body)
        assert doc["frames"] == [0, 1, 2, 3, 4]
        assert (doc["width"], doc["height"]) == (640, 360)

    def test_get_frame_png(self, server):
        base, _ = server
        status, body, ctype = get(f"{base}/api/frames/0.png")
        assert status == 200 and ctype == "image/png"
        im = Image.open(io.BytesIO(body))
        assert im.size == (640, 360)

    def test_missing_frame_404(self, server):
        base, _ = server
        with pytest.raises(urllib.error.HTTPError) as err:
            get(f"{base}/api/frames/99.png")
        assert err.value.code == 404


class TestRoiConfigApi:
    def test_initial_empty_config(self, server):
        base, _ = server
        _, body, _ = get(f"{base}/api/roi-config")
        doc = json.loads(body)
        assert doc["rois"] == []
        assert doc["version"] == 1

    def test_put_get_roundtrip(self, server):
        base, roi_path = server
        status, resp = put_json(f"{base}/api/roi-config", three_rois())
        assert status == 200
        assert resp["version"] == 2
        _, body, _ = get(f"{base}/api/roi-config")
        doc = json.loads(body)
        assert doc["version"] == 2
        assert doc["rois"] == three_rois()["rois"]
        assert roi_path.exists()  # persisted for the pipeline to pick up

    def test_put_invalid_rect_422(self, server):
        base, _ = server
        bad = three_rois()
        bad["rois"][0]["rect"] = [630, 0, 50, 20]  # exceeds 640 width
        status, resp = put_json(f"{base}/api/roi-config", bad)
        assert status == 422
        codes = {e["code"] for e in resp["errors"]}
        assert "OutOfBounds" in codes
        labels = {e["label"] for e in resp["errors"]}
        assert "lat" in labels  # errors are attributed per ROI

    def test_put_duplicate_label_422(self, server):
        base, _ = server
        bad = three_rois()
        bad["rois"][1]["label"] = "lat"
        bad["rois"][1]["kind"] = "altitude"
        status, resp = put_json(f"{base}/api/roi-config", bad)
        assert status == 422

    def test_put_stale_version_409(self, server):
        base, _ = server
        assert put_json(f"{base}/api/roi-config", three_rois())[0] == 200
        status, resp = put_json(f"{base}/api/roi-config", three_rois(version=1))
        assert status == 409
        assert resp["server_version"] == 2

    def test_put_malformed_422(self, server):
        base, _ = server
        status, _ = put_json(f"{base}/api/roi-config", {"frame_width": 1})
        assert status == 422


class TestPreviewAndEnhanced:
    def test_preview_png(self, server):
        base, _ = server
        put_json(f"{base}/api/roi-config", three_rois())
        status, body, ctype = get(f"{base}/api/preview/0.png")
        assert status == 200 and ctype == "image/png"
        im = Image.open(io.BytesIO(body))
        assert im.size == (640, 360)

    def test_enhanced_dimensions_coordinate(self, server):
        base, _ = server
        put_json(f"{base}/api/roi-config", three_rois())
        _, body, _ = get(f"{base}/api/enhanced/lat/0.png")
        im = Image.open(io.BytesIO(body))
        assert im.size == ((110 + 30) * 6, (18 + 30) * 6)

    def test_enhanced_dimensions_auxiliary(self, server):
        base, _ = server
        put_json(f"{base}/api/roi-config", three_rois())
        _, body, _ = get(f"{base}/api/enhanced/alt/0.png")
        im = Image.open(io.BytesIO(body))
        assert im.size == ((64 + 10) * 2, (18 + 10) * 2)

    def test_enhanced_unknown_label_404(self, server):
        base, _ = server
        with pytest.raises(urllib.error.HTTPError) as err:
            get(f"{base}/api/enhanced/mystery/0.png")
        assert err.value.code == 404


class TestStatic:
    def test_placeholder_without_frontend(self, server):
        base, _ = server
        status, body, ctype = get(f"{base}/")
        assert status == 200
        assert ctype.startswith("text/html")


FRONTEND_DIST = __import__("pathlib").Path(__file__).resolve().parents[1] / \
    "frontend" / "dist"


@pytest.mark.skipif(not (FRONTEND_DIST / "index.html").exists(),
                    reason="frontend not built (cd frontend && npm run build)")
class TestStaticWithFrontend:
    @pytest.fixture()
    def spa_server(self, dataset, tmp_path):
        source = FrameSource.from_directory(dataset / "frames", fps=1.0)
        state = AnnotatorState(source, tmp_path / "roi.json",
                               PreprocessParams(), static_dir=FRONTEND_DIST)
        srv = make_server(state, port=0)
        thread = threading.Thread(target=srv.serve_forever, daemon=True)
        thread.start()
        yield f"http://127.0.0.1:{srv.server_address[1]}"
        srv.shutdown()
        srv.server_close()
        thread.join(timeout=5)

    def test_index_served(self, spa_server):
        status, body, ctype = get(f"{spa_server}/")
        assert status == 200 and ctype == "text/html"
        assert b"annotator" in body

    def test_app_module_served(self, spa_server):
        status, body, ctype = get(f"{spa_server}/app.js")
        assert status == 200 and ctype == "text/javascript"
        assert b"AnnotationSession" in body

    def test_traversal_blocked(self, spa_server):
        with pytest.raises(urllib.error.HTTPError) as err:
            get(f"{spa_server}/../pyproject.toml")
        assert err.value.code == 404
