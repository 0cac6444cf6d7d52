/** Thin wrappers over the CLI server's localhost HTTP API. */

import type { RoiConfig, ValidationIssue } from "./model.js";

export interface FramesInfo {
  frames: number[];
  fps: number;
  width: number;
  height: number;
}

export type PutResult =
  | { status: "ok"; version: number }
  | { status: "invalid"; errors: ValidationIssue[] }
  | { status: "stale"; serverVersion: number }
  | { status: "network_error"; message: string };

export interface AnnotatorApi {
  getFrames(): Promise<FramesInfo>;
  getConfig(): Promise<RoiConfig>;
  putConfig(cfg: RoiConfig): Promise<PutResult>;
  frameUrl(index: number): string;
  previewUrl(index: number): string;
  enhancedUrl(label: string, index: number): string;
}

export function httpApi(base = ""): AnnotatorApi {
  return {
    async getFrames(): Promise<FramesInfo> {
      const resp = await fetch(`${base}/api/frames`);
      if (!resp.ok) throw new Error(`GET /api/frames: ${resp.status}`);
      return resp.json();
    },

    async getConfig(): Promise<RoiConfig> {
      const resp = await fetch(`${base}/api/roi-config`);
      if (!resp.ok) throw new Error(`GET /api/roi-config: ${resp.status}`);
      return resp.json();
    },

    async putConfig(cfg: RoiConfig): Promise<PutResult> {
      let resp: Response;
      try {
        resp = await fetch(`${base}/api/roi-config`, {
          method: "PUT",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify(cfg),
        });
      } catch (err) {
        return { status: "network_error", message: String(err) };
      }
      if (resp.status === 200) {
        const body = await resp.json();
        return { status: "ok", version: body.version };
      }
      if (resp.status === 422) {
        const body = await resp.json();
        return { status: "invalid", errors: body.errors ?? [] };
      }
      if (resp.status === 409) {
        const body = await resp.json();
        return { status: "stale", serverVersion: body.server_version };
      }
      return { status: "network_error", message: `HTTP ${resp.status}` };
    },

    frameUrl: (index: number) => `${base}/api/frames/${index}.png`,
    previewUrl: (index: number) => `${base}/api/preview/${index}.png`,
    enhancedUrl: (label: string, index: number) =>
      `${base}/api/enhanced/${encodeURIComponent(label)}/${index}.png`,
  };
}
