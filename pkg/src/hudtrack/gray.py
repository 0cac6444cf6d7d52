"""8-bit grayscale raster type plus PNG/PGM codecs.

All image work in the toolkit happens on ``GrayImage``: a thin immutable
wrapper around a 2-D uint8 numpy array.  Color inputs are reduced with
integer BT.601 luma (round half up) so decoding is bit-reproducible
across platforms.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError

__all__ = ["GrayImage", "luma_from_rgb", "decode_image", "encode_png"]


@dataclass(frozen=True)
class GrayImage:
    """Immutable 2-D uint8 raster; ``pixels`` is (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.dtype != np.uint8 or px.ndim != 2:
            raise ValueError("GrayImage requires a 2-D uint8 array")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("GrayImage must be at least 1x1")
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "GrayImage":
        return cls(np.asarray(arr, dtype=np.uint8))

    def __eq__(self, other) -> bool:
        return isinstance(other, GrayImage) and np.array_equal(self.pixels, other.pixels)


def luma_from_rgb(rgb: np.ndarray) -> np.ndarray:
    """BT.601 integer luma, round half up: round(0.299R + 0.587G + 0.114B)."""
    rgb = rgb.astype(np.float64)
    y = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.floor(y + 0.5).astype(np.uint8)


def decode_image(path: str | Path) -> GrayImage:
    """Decode a PNG or PGM file to grayscale.

    Raises DecodeError if the file cannot be parsed as an 8-bit image.
    """
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode == "L":
                arr = np.asarray(im, dtype=np.uint8)
            elif im.mode in ("RGB", "RGBA", "P", "I;16", "LA", "1"):
                rgb = np.asarray(im.convert("RGB"), dtype=np.uint8)
                arr = luma_from_rgb(rgb)
            else:
                raise DecodeError(f"{path}: unsupported image mode {im.mode!r}")
    except UnidentifiedImageError as exc:
        raise DecodeError(f"{path}: not a decodable image") from exc
    except OSError as exc:
        raise DecodeError(f"{path}: {exc}") from exc
    return GrayImage(arr)


def encode_png(img: GrayImage, path: str | Path | None = None) -> bytes:
    """Encode to PNG bytes; also writes to ``path`` when given."""
    buf = io.BytesIO()
    Image.fromarray(img.pixels, mode="L").save(buf, format="PNG")
    data = buf.getvalue()
    if path is not None:
        Path(path).write_bytes(data)
    return data
