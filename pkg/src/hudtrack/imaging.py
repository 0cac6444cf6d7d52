"""Image preprocessing kernels, implemented from scratch on numpy.

Conventions shared by every kernel:
  * replicate (edge) border extension,
  * float64 accumulation, rounding half up only at the final 8-bit cast,
  * deterministic output: identical input bytes give identical output bytes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidFactor, KernelError, TileConfigError
from .gray import GrayImage

logger = logging.getLogger(__name__)

__all__ = [
    "PreprocessParams",
    "sigma_for_kernel",
    "gaussian_kernel_1d",
    "clahe",
    "gaussian_blur",
    "adaptive_threshold",
    "sobel_xy",
    "upscale",
    "pad_border",
    "apply_frame_stages",
]


@dataclass(frozen=True)
class PreprocessParams:
    """Tunable knobs for the frame-level and ROI-level enhancement chains."""

    clahe_clip: float = 3.0
    clahe_tiles: tuple[int, int] = (8, 8)  # (columns, rows)
    blur_kernel: int = 5
    threshold_block: int = 19
    threshold_bias: float = 2.0
    stages_enabled: tuple[str, ...] = ("clahe", "blur", "threshold")
    # ROI-level constants: coordinate fields get heavy enhancement, the
    # auxiliary ones a lighter pass.
    coord_pad: int = 15
    coord_scale: int = 6
    coord_clip: float | None = None  # None: reuse clahe_clip
    aux_pad: int = 5
    aux_scale: int = 2
    aux_clip: float = 1.5

    def __post_init__(self):
        if self.clahe_clip < 1.0:
            raise ValueError("clahe_clip must be >= 1.0")
        if self.clahe_tiles[0] < 1 or self.clahe_tiles[1] < 1:
            raise ValueError("clahe_tiles must be >= 1x1")
        if self.blur_kernel < 1 or self.blur_kernel % 2 == 0:
            raise ValueError("blur_kernel must be odd >= 1")
        if self.threshold_block < 3 or self.threshold_block % 2 == 0:
            raise ValueError("threshold_block must be odd >= 3")
        unknown = set(self.stages_enabled) - {"clahe", "blur", "threshold", "sobel"}
        if unknown:
            raise ValueError(f"unknown stages: {sorted(unknown)}")

    @property
    def effective_coord_clip(self) -> float:
        return self.clahe_clip if self.coord_clip is None else self.coord_clip


def sigma_for_kernel(kernel: int) -> float:
    """Gaussian sigma derived from an odd kernel/block size."""
    return 0.3 * ((kernel - 1) * 0.5 - 1) + 0.8


def gaussian_kernel_1d(kernel: int) -> np.ndarray:
    """Sampled Gaussian of length ``kernel``, normalized to sum 1."""
    sigma = sigma_for_kernel(kernel)
    c = (kernel - 1) / 2.0
    x = np.arange(kernel, dtype=np.float64) - c
    w = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return w / w.sum()


def _round_u8(arr: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(arr + 0.5), 0, 255).astype(np.uint8)


def _correlate_axis(arr: np.ndarray, k1d: np.ndarray, axis: int) -> np.ndarray:
    """1-D correlation along ``axis`` with replicate borders, float64."""
    r = len(k1d) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (r, r)
    p = np.pad(arr, pad, mode="edge")
    out = np.zeros(arr.shape, dtype=np.float64)
    n = arr.shape[axis]
    for i, w in enumerate(k1d):
        if axis == 0:
            out += w * p[i:i + n, :]
        else:
            out += w * p[:, i:i + n]
    return out


def _gaussian_weighted(arr_f: np.ndarray, kernel: int) -> np.ndarray:
    k = gaussian_kernel_1d(kernel)
    return _correlate_axis(_correlate_axis(arr_f, k, 0), k, 1)


def gaussian_blur(img: GrayImage, kernel: int) -> GrayImage:
    """Gaussian smoothing; sigma follows ``sigma_for_kernel``."""
    if kernel < 1 or kernel % 2 == 0:
        raise KernelError(f"blur kernel must be odd >= 1, got {kernel}")
    if kernel == 1:
        return img
    out = _gaussian_weighted(img.pixels.astype(np.float64), kernel)
    return GrayImage(_round_u8(out))


def adaptive_threshold(img: GrayImage, block: int, bias: float) -> GrayImage:
    """Binarize against the local Gaussian-weighted mean.

    out(p) = 255 where src(p) > mean(p) - bias, else 0.
    """
    if block < 3 or block % 2 == 0:
        raise KernelError(f"threshold block must be odd >= 3, got {block}")
    src = img.pixels.astype(np.float64)
    mu = _gaussian_weighted(src, block)
    out = np.where(src > mu - bias, 255, 0).astype(np.uint8)
    return GrayImage(out)


_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.int64)


def sobel_xy(img: GrayImage) -> GrayImage:
    """Combined edge magnitude min(255, |gx| + |gy|) via 3x3 Sobel."""
    if img.width < 3 or img.height < 3:
        raise KernelError("sobel needs at least a 3x3 image")
    p = np.pad(img.pixels.astype(np.int64), 1, mode="edge")
    h, w = img.pixels.shape
    gx = np.zeros((h, w), dtype=np.int64)
    gy = np.zeros((h, w), dtype=np.int64)
    for dy in range(3):
        for dx in range(3):
            cx = _SOBEL_X[dy, dx]
            cy = _SOBEL_X[dx, dy]  # Gy is the transpose of Gx
            if cx or cy:
                win = p[dy:dy + h, dx:dx + w]
                if cx:
                    gx += cx * win
                if cy:
                    gy += cy * win
    mag = np.minimum(np.abs(gx) + np.abs(gy), 255).astype(np.uint8)
    return GrayImage(mag)


def upscale(img: GrayImage, factor: int) -> GrayImage:
    """Nearest-neighbor block replication by an integer factor."""
    if factor < 1:
        raise InvalidFactor(f"upscale factor must be >= 1, got {factor}")
    if factor == 1:
        return img
    px = np.repeat(np.repeat(img.pixels, factor, axis=0), factor, axis=1)
    return GrayImage(px)


def pad_border(img: GrayImage, px: int, fill: int | str = 0) -> GrayImage:
    """Grow the image by ``px`` on every side.

    ``fill="auto"`` uses the median of the original one-pixel border ring
    (rounded half up), which keeps glyph/background polarity stable.
    """
    if px < 0:
        raise ValueError("pad must be non-negative")
    if px == 0:
        return img
    if fill == "auto":
        a = img.pixels
        ring = [a[0, :], a[-1, :]]
        if a.shape[0] > 2:
            ring += [a[1:-1, 0], a[1:-1, -1]]
        fill_v = int(np.floor(np.median(np.concatenate(ring)) + 0.5))
    else:
        fill_v = int(fill)
        if not 0 <= fill_v <= 255:
            raise ValueError("fill must be within 0..255")
    out = np.pad(img.pixels, px, mode="constant", constant_values=fill_v)
    return GrayImage(out)


def clahe(img: GrayImage, clip: float, tiles: tuple[int, int]) -> GrayImage:
    """Contrast-limited adaptive histogram equalization.

    Per tile: 256-bin histogram clipped at clip*(tile_pixels/256), the
    excess redistributed uniformly over all bins (single pass), then an
    equalization lookup lut[v] = round(cdf[v] * 255 / tile_pixels).
    Output pixels bilinearly blend the four surrounding tile lookups;
    edge tiles replicate outward.
    """
    tx, ty = int(tiles[0]), int(tiles[1])
    if tx < 1 or ty < 1:
        raise TileConfigError(f"tile grid must be >= 1x1, got {tiles}")
    if tx > img.width or ty > img.height:
        raise TileConfigError(
            f"tile grid {tx}x{ty} exceeds image {img.width}x{img.height}")
    px = img.pixels
    h, w = px.shape

    x_edges = (np.arange(tx + 1) * w) // tx
    y_edges = (np.arange(ty + 1) * h) // ty
    luts = np.empty((ty, tx, 256), dtype=np.float64)
    for i in range(ty):
        for j in range(tx):
            tile = px[y_edges[i]:y_edges[i + 1], x_edges[j]:x_edges[j + 1]]
            luts[i, j] = _clipped_equalization_lut(tile, clip)

    cx = (x_edges[:-1] + x_edges[1:] - 1) / 2.0
    cy = (y_edges[:-1] + y_edges[1:] - 1) / 2.0
    j0, j1, wx = _interp_coords(np.arange(w, dtype=np.float64), cx)
    i0, i1, wy = _interp_coords(np.arange(h, dtype=np.float64), cy)

    v = px.astype(np.intp)
    ii0 = i0[:, None]
    ii1 = i1[:, None]
    jj0 = j0[None, :]
    jj1 = j1[None, :]
    wyc = wy[:, None]
    wxc = wx[None, :]
    out = ((1 - wyc) * (1 - wxc) * luts[ii0, jj0, v]
           + (1 - wyc) * wxc * luts[ii0, jj1, v]
           + wyc * (1 - wxc) * luts[ii1, jj0, v]
           + wyc * wxc * luts[ii1, jj1, v])
    return GrayImage(_round_u8(out))


def _clipped_equalization_lut(tile: np.ndarray, clip: float) -> np.ndarray:
    n = tile.size
    hist = np.bincount(tile.ravel(), minlength=256).astype(np.float64)
    clip_t = clip * n / 256.0
    excess = np.maximum(hist - clip_t, 0.0).sum()
    hist = np.minimum(hist, clip_t) + excess / 256.0
    cdf = np.cumsum(hist)
    return np.clip(np.floor(cdf * 255.0 / n + 0.5), 0, 255)


def _interp_coords(coords: np.ndarray, centers: np.ndarray):
    """Neighboring tile indices and blend weight for each coordinate."""
    k = len(centers)
    hi = np.searchsorted(centers, coords, side="right")
    lo = hi - 1
    lo_c = np.clip(lo, 0, k - 1)
    hi_c = np.clip(hi, 0, k - 1)
    span = centers[hi_c] - centers[lo_c]
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(span > 0, (coords - centers[lo_c]) / np.where(span > 0, span, 1), 0.0)
    t = np.clip(t, 0.0, 1.0)
    return lo_c, hi_c, t


def apply_frame_stages(img: GrayImage, params: PreprocessParams) -> GrayImage:
    """Run the configured frame-level stage chain in order."""
    out = img
    for stage in params.stages_enabled:
        if stage == "clahe":
            tiles = (min(params.clahe_tiles[0], out.width),
                     min(params.clahe_tiles[1], out.height))
            if tiles != params.clahe_tiles:
                logger.warning("clamping CLAHE tiles %s -> %s for %dx%d frame",
                               params.clahe_tiles, tiles, out.width, out.height)
            out = clahe(out, params.clahe_clip, tiles)
        elif stage == "blur":
            out = gaussian_blur(out, params.blur_kernel)
        elif stage == "threshold":
            out = adaptive_threshold(out, params.threshold_block, params.threshold_bias)
        elif stage == "sobel":
            out = sobel_xy(out)
    return out
