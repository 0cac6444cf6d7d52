import { describe, expect, it } from "vitest";

import type { AnnotatorApi, FramesInfo, PutResult } from "../src/api.js";
import type { RoiConfig } from "../src/model.js";
import { AnnotationSession } from "../src/session.js";
import type { KeyValueStore } from "../src/session.js";

function emptyConfig(version = 1): RoiConfig {
  return { version, frame_width: 640, frame_height: 360, rois: [] };
}

/** In-memory stand-in for the server, implementing the documented API
 *  contract: 200 with version bump, 422 on invalid, 409 on stale. */
class FakeServer implements AnnotatorApi {
  config: RoiConfig = emptyConfig();
  failNetwork = false;
  putCount = 0;

  async getFrames(): Promise<FramesInfo> {
    return { frames: [0, 1, 2], fps: 1, width: 640, height: 360 };
  }

  async getConfig(): Promise<RoiConfig> {
    return structuredClone(this.config);
  }

  /** Simulates a server with one rule the client mirror lacks, so a 422
   *  can reach the session despite local validation passing. */
  serverOnlyMaxWidth = Infinity;

  async putConfig(cfg: RoiConfig): Promise<PutResult> {
    this.putCount += 1;
    if (this.failNetwork) {
      return { status: "network_error", message: "connection refused" };
    }
    const bad = cfg.rois.filter((r) => r.rect[2] > this.serverOnlyMaxWidth);
    if (bad.length) {
      return {
        status: "invalid",
        errors: bad.map((r) => ({
          label: r.label, code: "OutOfBounds", message: "rect exceeds frame",
        })),
      };
    }
    if (cfg.version !== this.config.version) {
      return { status: "stale", serverVersion: this.config.version };
    }
    this.config = structuredClone({ ...cfg, version: cfg.version + 1 });
    return { status: "ok", version: this.config.version };
  }

  frameUrl = (i: number) => `/api/frames/${i}.png`;
  previewUrl = (i: number) => `/api/preview/${i}.png`;
  enhancedUrl = (label: string, i: number) => `/api/enhanced/${label}/${i}.png`;
}

class MemoryStore implements KeyValueStore {
  private map = new Map<string, string>();
  getItem(k: string) { return this.map.get(k) ?? null; }
  setItem(k: string, v: string) { this.map.set(k, v); }
  removeItem(k: string) { this.map.delete(k); }
}

function drawThree(session: AnnotationSession) {
  session.addRoi([20, 20, 110, 18], "latitude", 2);
  session.addRoi([20, 50, 110, 18], "longitude", 2);
  session.addRoi([20, 80, 60, 18], "altitude", null);
}

describe("AnnotationSession", () => {
  it("drawing marks the session dirty and suggests labels", () => {
    const server = new FakeServer();
    const session = new AnnotationSession(server, emptyConfig());
    expect(session.dirty).toBe(false);
    const spec = session.addRoi([10, 10, 50, 20], "latitude", 2);
    expect(spec?.label).toBe("lat");
    expect(session.dirty).toBe(true);
  });

  it("rejects sub-2-pixel rects", () => {
    const session = new AnnotationSession(new FakeServer(), emptyConfig());
    expect(session.addRoi([10, 10, 1, 30], "altitude", null)).toBeNull();
    expect(session.config.rois).toHaveLength(0);
    expect(session.dirty).toBe(false);
  });

  it("save -> version bump -> clean; reload returns identical rois", async () => {
    const server = new FakeServer();
    const session = new AnnotationSession(server, emptyConfig());
    drawThree(session);
    const outcome = await session.save();
    expect(outcome).toEqual({ kind: "saved", version: 2 });
    expect(session.dirty).toBe(false);
    expect(session.serverVersion).toBe(2);

    // a fresh session (page reload) sees the identical config
    const fresh = new AnnotationSession(server, await server.getConfig());
    expect(fresh.config.rois).toEqual(session.config.rois);
    expect(fresh.config.version).toBe(2);
  });

  it("never sends a locally-invalid config", async () => {
    const server = new FakeServer();
    const session = new AnnotationSession(server, emptyConfig());
    session.addRoi([20, 20, 110, 18], "latitude", null); // missing digits
    const outcome = await session.save();
    expect(outcome.kind).toBe("rejected");
    expect(server.putCount).toBe(0); // blocked client-side
    if (outcome.kind === "rejected") {
      expect(outcome.errors.map((e) => e.code)).toContain("MissingIntDigits");
    }
  });

  it("server 422 errors are kept for rendering", async () => {
    const server = new FakeServer();
    server.serverOnlyMaxWidth = 100; // rule the client mirror lacks
    const session = new AnnotationSession(server, emptyConfig());
    session.addRoi([20, 20, 110, 18], "altitude", null); // client-valid
    const outcome = await session.save();
    expect(outcome.kind).toBe("rejected");
    expect(server.putCount).toBe(1);
    expect(session.lastErrors[0]?.label).toBe("alt");
    expect(session.dirty).toBe(true); // edits retained
  });

  it("stale version is reported and resolved by reload", async () => {
    const server = new FakeServer();
    const session = new AnnotationSession(server, emptyConfig());
    drawThree(session);
    // another tab saved meanwhile
    server.config.version = 5;
    const outcome = await session.save();
    expect(outcome).toEqual({ kind: "stale", serverVersion: 5 });
    await session.reload();
    expect(session.serverVersion).toBe(5);
    expect(session.dirty).toBe(false);
  });

  it("network failure keeps the working copy and the backup", async () => {
    const server = new FakeServer();
    const store = new MemoryStore();
    const session = new AnnotationSession(server, emptyConfig(), store);
    drawThree(session);
    server.failNetwork = true;
    const outcome = await session.save();
    expect(outcome.kind).toBe("retry");
    expect(session.dirty).toBe(true);
    expect(session.config.rois).toHaveLength(3);

    // a crashed tab restores the working copy from the store
    const revived = new AnnotationSession(server, emptyConfig(), store);
    expect(revived.dirty).toBe(true);
    expect(revived.config.rois).toHaveLength(3);
  });

  it("successful save clears the crash backup", async () => {
    const server = new FakeServer();
    const store = new MemoryStore();
    const session = new AnnotationSession(server, emptyConfig(), store);
    drawThree(session);
    await session.save();
    const revived = new AnnotationSession(server, await server.getConfig(), store);
    expect(revived.dirty).toBe(false);
  });

  it("stale backups from another version are ignored", async () => {
    const server = new FakeServer();
    const store = new MemoryStore();
    const session = new AnnotationSession(server, emptyConfig(), store);
    drawThree(session);                       // backup at version 1
    await session.save();                     // server now at version 2
    const fresh = new AnnotationSession(server, await server.getConfig(), store);
    expect(fresh.config.version).toBe(2);
    expect(fresh.dirty).toBe(false);
  });
});
