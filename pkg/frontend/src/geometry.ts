/** Rectangle math for the canvas drawing tool. */

import type { Rect } from "./model.js";

export type Handle =
  | "nw" | "n" | "ne" | "e" | "se" | "s" | "sw" | "w" | "move";

export const MIN_SIZE = 2; // rects under 2 px are rejected as accidents

/** Turn any drag gesture (in either direction) into a positive-size rect. */
export function normalizeRect(x0: number, y0: number,
                              x1: number, y1: number): Rect {
  const x = Math.min(x0, x1);
  const y = Math.min(y0, y1);
  return [Math.round(x), Math.round(y),
          Math.round(Math.abs(x1 - x0)), Math.round(Math.abs(y1 - y0))];
}

/** Clamp a point to the image bounds (drags may leave the canvas). */
export function clampPoint(x: number, y: number,
                           width: number, height: number): [number, number] {
  return [Math.min(Math.max(x, 0), width), Math.min(Math.max(y, 0), height)];
}

/** Shift/resize so the rect stays fully inside the frame. */
export function clampRect(rect: Rect, width: number, height: number): Rect {
  let [x, y, w, h] = rect;
  w = Math.min(w, width);
  h = Math.min(h, height);
  x = Math.min(Math.max(x, 0), width - w);
  y = Math.min(Math.max(y, 0), height - h);
  return [x, y, w, h];
}

const HANDLE_RADIUS = 5;

/** Which part of a rect a point grabs: a corner/edge handle, the body
 *  ("move"), or nothing. */
export function hitHandle(rect: Rect, px: number, py: number): Handle | null {
  const [x, y, w, h] = rect;
  const near = (a: number, b: number) => Math.abs(a - b) <= HANDLE_RADIUS;
  const withinX = px >= x - HANDLE_RADIUS && px <= x + w + HANDLE_RADIUS;
  const withinY = py >= y - HANDLE_RADIUS && py <= y + h + HANDLE_RADIUS;
  if (!withinX || !withinY) return null;

  const left = near(px, x);
  const right = near(px, x + w);
  const top = near(py, y);
  const bottom = near(py, y + h);
  if (top && left) return "nw";
  if (top && right) return "ne";
  if (bottom && left) return "sw";
  if (bottom && right) return "se";
  if (top) return "n";
  if (bottom) return "s";
  if (left) return "w";
  if (right) return "e";
  if (px >= x && px <= x + w && py >= y && py <= y + h) return "move";
  return null;
}

/** Apply a drag delta to a rect through the grabbed handle. */
export function applyHandleDrag(rect: Rect, handle: Handle,
                                dx: number, dy: number): Rect {
  let [x, y, w, h] = rect;
  let x2 = x + w;
  let y2 = y + h;
  switch (handle) {
    case "move": x += dx; y += dy; x2 += dx; y2 += dy; break;
    case "nw": x += dx; y += dy; break;
    case "ne": x2 += dx; y += dy; break;
    case "sw": x += dx; y2 += dy; break;
    case "se": x2 += dx; y2 += dy; break;
    case "n": y += dy; break;
    case "s": y2 += dy; break;
    case "w": x += dx; break;
    case "e": x2 += dx; break;
  }
  return normalizeRect(x, y, x2, y2);
}
