import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hudtrack.errors import DecodeError, FrameMissing, InvalidInterval
from hudtrack.gray import GrayImage, encode_png, luma_from_rgb
from hudtrack.ingest import FrameSource, plan_sampling, select_frames, load_frame


class TestPlanSampling:
    @pytest.mark.parametrize("interval,expected", [(1, 122), (5, 25), (10, 13),
                                                   (15, 9), (20, 7)])
    def test_counts_for_121s_flight(self, interval, expected):
        assert len(plan_sampling(121, interval).timestamps) == expected

    def test_degenerate_duration(self):
        assert plan_sampling(0, 5).timestamps == (0,)

    def test_timestamps_are_multiples(self):
        plan = plan_sampling(47, 5)
        assert plan.timestamps == (0, 5, 10, 15, 20, 25, 30, 35, 40, 45)

    @pytest.mark.parametrize("bad", [0, -1, 0.5])
    def test_invalid_interval(self, bad):
        with pytest.raises(InvalidInterval):
            plan_sampling(10, bad)

    def test_negative_duration(self):
        with pytest.raises(InvalidInterval):
            plan_sampling(-1, 1)

    @given(st.integers(min_value=0, max_value=10_000),
           st.integers(min_value=1, max_value=120))
    def test_count_formula(self, duration, interval):
        plan = plan_sampling(duration, interval)
        assert len(plan.timestamps) == duration // interval + 1
        assert plan.timestamps[0] == 0
        assert plan.timestamps[-1] <= duration


class TestSelectFrames:
    def test_t0(self):
        plan = plan_sampling(0, 1)
        assert select_frames(plan, 30.0) == (0,)

    def test_one_second_at_30fps(self):
        plan = plan_sampling(1, 1)
        assert select_frames(plan, 30.0) == (0, 30)

    def test_ntsc_rate_rounds(self):
        # round(10 * 29.97) = round(299.7) = 300
        plan = plan_sampling(10, 10)
        assert select_frames(plan, 29.97) == (0, 300)

    def test_clamping_and_dedup(self):
        plan = plan_sampling(10, 1)
        idx = select_frames(plan, 1.0, frame_count=5)
        assert idx == (0, 1, 2, 3, 4)

    @given(st.floats(min_value=0.5, max_value=120.0),
           st.integers(min_value=0, max_value=500))
    def test_monotone(self, fps, duration):
        plan = plan_sampling(duration, 1)
        idx = select_frames(plan, fps)
        assert list(idx) == sorted(set(idx))


class TestLuma:
    def test_white(self):
        rgb = np.array([[[255, 255, 255]]], dtype=np.uint8)
        assert luma_from_rgb(rgb)[0, 0] == 255

    def test_pure_red(self):
        rgb = np.array([[[255, 0, 0]]], dtype=np.uint8)
        assert luma_from_rgb(rgb)[0, 0] == 76  # round(0.299 * 255)

    @given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
    def test_matches_formula(self, r, g, b):
        y = luma_from_rgb(np.array([[[r, g, b]]], dtype=np.uint8))[0, 0]
        import math
        assert y == math.floor(0.299 * r + 0.587 * g + 0.114 * b + 0.5)


class TestLoadFrame:
    def test_pgm_roundtrip(self, tmp_path):
        path = tmp_path / "frame_000000.pgm"
        path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 64, 128, 255]))
        src = FrameSource.from_directory(tmp_path, fps=1.0)
        img = load_frame(src, 0)
        assert img.pixels.tolist() == [[0, 64], [128, 255]]

    def test_png_roundtrip(self, tmp_path):
        arr = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
        encode_png(GrayImage(arr), tmp_path / "frame_000000.png")
        src = FrameSource.from_directory(tmp_path, fps=2.0)
        assert np.array_equal(load_frame(src, 0).pixels, arr)

    def test_deterministic(self, tmp_path):
        arr = np.random.default_rng(1).integers(0, 256, (8, 8)).astype(np.uint8)
        encode_png(GrayImage(arr), tmp_path / "frame_000000.png")
        src = FrameSource.from_directory(tmp_path, fps=1.0)
        assert load_frame(src, 0) == load_frame(src, 0)

    def test_missing_index(self, tmp_path):
        encode_png(GrayImage(np.zeros((2, 2), np.uint8)), tmp_path / "frame_000000.png")
        src = FrameSource.from_directory(tmp_path, fps=1.0)
        with pytest.raises(FrameMissing):
            load_frame(src, 5)

    def test_undecodable(self, tmp_path):
        bad = tmp_path / "frame_000000.png"
        bad.write_bytes(b"not a png at all")
        src = FrameSource.from_directory(tmp_path, fps=1.0)
        with pytest.raises(DecodeError):
            load_frame(src, 0)

    def test_color_png_uses_luma(self, tmp_path):
        from PIL import Image
        rgb = np.zeros((1, 2, 3), dtype=np.uint8)
        rgb[0, 0] = (255, 0, 0)
        rgb[0, 1] = (0, 255, 0)
        Image.fromarray(rgb, "RGB").save(tmp_path / "frame_000000.png")
        src = FrameSource.from_directory(tmp_path, fps=1.0)
        assert load_frame(src, 0).pixels.tolist() == [[76, 150]]


class TestFrameSource:
    def test_duration_derived(self, tmp_path):
        for i in range(4):
            encode_png(GrayImage(np.zeros((2, 2), np.uint8)),
                       tmp_path / f"frame_{i:06d}.png")
        src = FrameSource.from_directory(tmp_path, fps=2.0)
        assert src.frame_count == 4
        assert src.duration_s == pytest.approx(1.5)

    def test_duration_override(self, tmp_path):
        encode_png(GrayImage(np.zeros((2, 2), np.uint8)), tmp_path / "frame_000000.png")
        src = FrameSource.from_directory(tmp_path, fps=1.0, duration_override_s=121.0)
        assert src.duration_s == 121.0

    def test_empty_dir(self, tmp_path):
        with pytest.raises(FrameMissing):
            FrameSource.from_directory(tmp_path, fps=1.0)
