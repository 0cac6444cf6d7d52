"""Embedded 5x7 bitmap font.

The same glyph matrices back three consumers: the synthetic HUD renderer,
the builtin template recognizer, and label text on ROI preview overlays.
Sharing one source makes the zero-noise render/recognize round trip exact
by construction.

Recognized glyphs keep their ink columns contiguous (no internal blank
column), so vertical-projection segmentation always recovers whole glyphs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["GLYPH_W", "GLYPH_H", "FONT", "RECOGNITION_CHARSET",
           "GlyphTemplateSet", "builtin_templates", "glyph_bitmap",
           "render_text_bitmap", "text_pixel_size"]

GLYPH_W = 5
GLYPH_H = 7

# fmt: off
_GLYPHS = {
    "0": (".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."),
    "1": ("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "2": (".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"),
    "3": ("####.", "....#", "...#.", "..##.", "....#", "#...#", ".###."),
    "4": ("...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."),
    "5": ("#####", "#....", "####.", "....#", "....#", "#...#", ".###."),
    "6": ("..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."),
    "7": ("#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."),
    "8": (".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),
    "9": (".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."),
    ".": (".....", ".....", ".....", ".....", ".....", ".##..", ".##.."),
    "-": (".....", ".....", ".....", "#####", ".....", ".....", "....."),
    "m": (".....", ".....", "##.#.", "#.#.#", "#.#.#", "#...#", "#...#"),
    "k": ("#....", "#....", "#..#.", "#.#..", "##...", "#.#..", "#..#."),
    "h": ("#....", "#....", "####.", "#...#", "#...#", "#...#", "#...#"),
    "/": ("....#", "....#", "...#.", "..#..", ".#...", "#....", "#...."),
    "%": ("##..#", "##..#", "...#.", "..#..", ".#...", "#..##", "#..##"),
    "V": ("#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."),
    " ": (".....", ".....", ".....", ".....", ".....", ".....", "....."),
    "A": (".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "B": ("####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."),
    "C": (".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."),
    "D": ("###..", "#..#.", "#...#", "#...#", "#...#", "#..#.", "###.."),
    "E": ("#####", "#....", "#....", "####.", "#....", "#....", "#####"),
    "F": ("#####", "#....", "#....", "####.", "#....", "#....", "#...."),
    "G": (".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####"),
    "H": ("#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "I": (".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "J": ("..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."),
    "K": ("#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"),
    "L": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "M": ("#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"),
    "N": ("#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#", "#...#"),
    "O": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "P": ("####.", "#...#", "#...#", "####.", "#....", "#....", "#...."),
    "Q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "R": ("####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"),
    "S": (".####", "#....", "#....", ".###.", "....#", "....#", "####."),
    "T": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "U": ("#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "W": ("#...#", "#...#", "#...#", "#.#.#", "#.#.#", "##.##", "#...#"),
    "X": ("#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"),
    "Y": ("#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."),
    "Z": ("#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"),
}
# fmt: on

FONT: dict[str, np.ndarray] = {
    ch: np.array([[c == "#" for c in row] for row in rows], dtype=bool)
    for ch, rows in _GLYPHS.items()
}

RECOGNITION_CHARSET = "0123456789.-mkh/%V"


@dataclass(frozen=True)
class GlyphTemplateSet:
    """Binary glyph templates, all ``glyph_h`` x ``glyph_w``."""

    glyph_w: int
    glyph_h: int
    bitmaps: dict[str, np.ndarray]

    def __post_init__(self):
        for ch, bm in self.bitmaps.items():
            if bm.shape != (self.glyph_h, self.glyph_w):
                raise ValueError(f"template {ch!r} has shape {bm.shape}")


def builtin_templates() -> GlyphTemplateSet:
    return GlyphTemplateSet(
        GLYPH_W, GLYPH_H,
        {ch: FONT[ch].copy() for ch in RECOGNITION_CHARSET})


def glyph_bitmap(ch: str) -> np.ndarray:
    """Glyph matrix for ``ch``; falls back to uppercase, then blank."""
    if ch in FONT:
        return FONT[ch]
    if ch.upper() in FONT:
        return FONT[ch.upper()]
    return FONT[" "]


def text_pixel_size(text: str, scale: int = 1) -> tuple[int, int]:
    """(width, height) of ``render_text_bitmap`` output."""
    if not text:
        return (0, GLYPH_H * scale)
    w = (len(text) * (GLYPH_W + 1) - 1) * scale
    return (w, GLYPH_H * scale)


def render_text_bitmap(text: str, scale: int = 1) -> np.ndarray:
    """Render ``text`` to a boolean ink matrix.

    Glyph cells are laid out left to right with a one-column (pre-scale)
    gap; the whole matrix is then replicated by ``scale``.
    """
    if scale < 1:
        raise ValueError("scale must be >= 1")
    if not text:
        return np.zeros((GLYPH_H, 0), dtype=bool)
    cells = []
    for i, ch in enumerate(text):
        cells.append(glyph_bitmap(ch))
        if i != len(text) - 1:
            cells.append(np.zeros((GLYPH_H, 1), dtype=bool))
    line = np.concatenate(cells, axis=1)
    if scale > 1:
        line = np.repeat(np.repeat(line, scale, axis=0), scale, axis=1)
    return line
