/**
 * Canvas annotator: draw labeled rectangles over a sampled HUD frame,
 * validate them, save to the pipeline server, and preview how each
 * field looks after enhancement.
 */

import { httpApi } from "./api.js";
import type { FramesInfo } from "./api.js";
import { applyHandleDrag, clampPoint, clampRect, hitHandle,
         normalizeRect } from "./geometry.js";
import type { Handle } from "./geometry.js";
import { ROI_KINDS, enhancedSize, isCoordinate } from "./model.js";
import type { Rect, RoiKind } from "./model.js";
import { AnnotationSession } from "./session.js";

const api = httpApi();

interface DragState {
  mode: "create" | "edit";
  index: number;          // roi index for edit mode
  handle: Handle;         // edit mode handle
  startX: number;
  startY: number;
  originRect: Rect;       // rect at drag start (edit mode)
}

class App {
  private session!: AnnotationSession;
  private frames!: FramesInfo;
  private frameIndex = 0;
  private frameImage = new Image();
  private selected = -1;
  private drag: DragState | null = null;

  private canvas = el<HTMLCanvasElement>("canvas");
  private ctx = this.canvas.getContext("2d")!;
  private roiList = el<HTMLDivElement>("roi-list");
  private status = el<HTMLDivElement>("status");
  private issues = el<HTMLDivElement>("issues");
  private kindSelect = el<HTMLSelectElement>("kind-select");
  private digitsInput = el<HTMLInputElement>("digits-input");
  private previewRaw = el<HTMLCanvasElement>("preview-raw");
  private previewEnhanced = el<HTMLImageElement>("preview-enhanced");
  private previewHint = el<HTMLDivElement>("preview-hint");

  async start(): Promise<void> {
    this.frames = await api.getFrames();
    const config = await api.getConfig();
    this.session = new AnnotationSession(api, config, window.localStorage);

    this.canvas.width = this.frames.width;
    this.canvas.height = this.frames.height;
    for (const kind of ROI_KINDS) {
      const opt = document.createElement("option");
      opt.value = kind;
      opt.textContent = kind;
      this.kindSelect.appendChild(opt);
    }
    this.kindSelect.addEventListener("change", () => this.syncDigitsVisibility());
    this.syncDigitsVisibility();

    el<HTMLButtonElement>("save-btn").addEventListener("click", () => this.save());
    el<HTMLButtonElement>("reload-btn").addEventListener(
      "click", () => this.reload());
    el<HTMLButtonElement>("prev-frame").addEventListener(
      "click", () => this.setFrame(this.frameIndex - 1));
    el<HTMLButtonElement>("next-frame").addEventListener(
      "click", () => this.setFrame(this.frameIndex + 1));

    this.canvas.addEventListener("mousedown", (e) => this.onDown(e));
    this.canvas.addEventListener("mousemove", (e) => this.onMove(e));
    window.addEventListener("mouseup", () => this.onUp());

    await this.setFrame(0);
    this.renderAll();
  }

  private syncDigitsVisibility(): void {
    const coordinate = isCoordinate(this.kindSelect.value as RoiKind);
    el<HTMLLabelElement>("digits-label").style.display =
      coordinate ? "inline" : "none";
  }

  private async setFrame(index: number): Promise<void> {
    const clamped = Math.min(Math.max(index, 0), this.frames.frames.length - 1);
    this.frameIndex = clamped;
    el<HTMLSpanElement>("frame-label").textContent =
      `frame ${clamped} / ${this.frames.frames.length - 1}`;
    await new Promise<void>((resolve, reject) => {
      this.frameImage = new Image();
      this.frameImage.onload = () => resolve();
      this.frameImage.onerror = () => reject(new Error("frame load failed"));
      this.frameImage.src = api.frameUrl(clamped);
    });
    this.renderAll();
  }

  // --- mouse handling -------------------------------------------------

  private canvasPoint(e: MouseEvent): [number, number] {
    const rect = this.canvas.getBoundingClientRect();
    const x = (e.clientX - rect.left) * (this.canvas.width / rect.width);
    const y = (e.clientY - rect.top) * (this.canvas.height / rect.height);
    return clampPoint(x, y, this.frames.width, this.frames.height);
  }

  private onDown(e: MouseEvent): void {
    const [x, y] = this.canvasPoint(e);
    for (let i = this.session.config.rois.length - 1; i >= 0; i--) {
      const roi = this.session.config.rois[i]!;
      const handle = hitHandle(roi.rect, x, y);
      if (handle) {
        this.selected = i;
        this.drag = { mode: "edit", index: i, handle, startX: x, startY: y,
                      originRect: [...roi.rect] as Rect };
        this.renderAll();
        return;
      }
    }
    this.drag = { mode: "create", index: -1, handle: "se",
                  startX: x, startY: y, originRect: [x, y, 0, 0] };
  }

  private onMove(e: MouseEvent): void {
    if (!this.drag) return;
    const [x, y] = this.canvasPoint(e);
    if (this.drag.mode === "create") {
      this.renderAll();
      const rect = normalizeRect(this.drag.startX, this.drag.startY, x, y);
      this.strokeRect(rect, "#ffd24a", true);
    } else {
      const dx = x - this.drag.startX;
      const dy = y - this.drag.startY;
      const moved = applyHandleDrag(this.drag.originRect, this.drag.handle,
                                    dx, dy);
      this.session.updateRect(
        this.drag.index,
        clampRect(moved, this.frames.width, this.frames.height));
      this.renderAll();
    }
  }

  private onUp(): void {
    if (!this.drag) return;
    const drag = this.drag;
    this.drag = null;
    if (drag.mode === "create") {
      const kind = this.kindSelect.value as RoiKind;
      const digits = isCoordinate(kind)
        ? Math.max(1, Number(this.digitsInput.value) || 2) : null;
      const rect = normalizeRect(drag.startX, drag.startY,
                                 this.lastX, this.lastY);
      const spec = this.session.addRoi(
        clampRect(rect, this.frames.width, this.frames.height), kind, digits);
      if (spec === null && (rect[2] > 0 || rect[3] > 0)) {
        this.setStatus("rectangle too small (under 2 px); not added", "warn");
      }
      this.selected = this.session.config.rois.length - 1;
    }
    this.renderAll();
  }

  private lastX = 0;
  private lastY = 0;

  // --- rendering --------------------------------------------------------

  private renderAll(): void {
    this.ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    this.ctx.drawImage(this.frameImage, 0, 0);
    this.session?.config.rois.forEach((roi, i) => {
      this.strokeRect(roi.rect, i === this.selected ? "#6cf542" : "#4ab3ff");
      this.ctx.font = "12px monospace";
      this.ctx.fillStyle = "#ffffff";
      this.ctx.fillText(roi.label, roi.rect[0], Math.max(10, roi.rect[1] - 4));
    });
    this.renderSidebar();
    this.renderPreview();
  }

  private strokeRect(rect: Rect, color: string, dashed = false): void {
    const [x, y, w, h] = rect;
    this.ctx.save();
    this.ctx.strokeStyle = color;
    this.ctx.lineWidth = 2;
    if (dashed) this.ctx.setLineDash([5, 3]);
    this.ctx.strokeRect(x + 0.5, y + 0.5, w, h);
    this.ctx.restore();
  }

  private renderSidebar(): void {
    if (!this.session) return;
    this.roiList.innerHTML = "";
    const report = this.session.validate();
    this.session.config.rois.forEach((roi, i) => {
      const row = document.createElement("div");
      row.className = "roi-row" + (i === this.selected ? " selected" : "");

      const label = document.createElement("input");
      label.value = roi.label;
      label.addEventListener("change",
        () => { this.session.updateRoi(i, { label: label.value }); this.renderAll(); });

      const kind = document.createElement("select");
      for (const k of ROI_KINDS) {
        const opt = document.createElement("option");
        opt.value = k;
        opt.textContent = k;
        opt.selected = k === roi.kind;
        kind.appendChild(opt);
      }
      kind.addEventListener("change", () => {
        const nextKind = kind.value as RoiKind;
        this.session.updateRoi(i, {
          kind: nextKind,
          int_digits: isCoordinate(nextKind) ? (roi.int_digits ?? 2) : null,
        });
        this.renderAll();
      });

      const digits = document.createElement("input");
      digits.type = "number";
      digits.min = "1";
      digits.style.width = "3.5em";
      digits.value = roi.int_digits === null ? "" : String(roi.int_digits);
      digits.style.display = isCoordinate(roi.kind) ? "inline" : "none";
      digits.addEventListener("change", () => {
        this.session.updateRoi(i, { int_digits: Number(digits.value) || null });
        this.renderAll();
      });

      const del = document.createElement("button");
      del.textContent = "x";
      del.addEventListener("click", () => {
        this.session.removeRoi(i);
        this.selected = -1;
        this.renderAll();
      });

      row.append(label, kind, digits, del);
      row.addEventListener("click", () => {
        if (this.selected !== i) { this.selected = i; this.renderAll(); }
      });

      const rowIssues = report.errors.filter((e) => e.label === roi.label);
      for (const issue of rowIssues) {
        const msg = document.createElement("div");
        msg.className = "issue";
        msg.textContent = `${issue.code}: ${issue.message}`;
        row.appendChild(msg);
      }
      this.roiList.appendChild(row);
    });

    this.issues.innerHTML = "";
    for (const issue of [...report.errors.filter((e) => e.label === ""),
                         ...this.session.lastErrors]) {
      const div = document.createElement("div");
      div.className = "issue";
      div.textContent = `${issue.label ? issue.label + ": " : ""}`
        + `${issue.code}: ${issue.message}`;
      this.issues.appendChild(div);
    }
    for (const warning of report.warnings) {
      const div = document.createElement("div");
      div.className = "warning";
      div.textContent = `${warning.code}: ${warning.message}`;
      this.issues.appendChild(div);
    }
    el<HTMLButtonElement>("save-btn").disabled = !this.session.dirty;
    el<HTMLSpanElement>("version-label").textContent =
      `v${this.session.serverVersion}${this.session.dirty ? " (unsaved)" : ""}`;
  }

  private renderPreview(): void {
    const roi = this.session?.config.rois[this.selected];
    if (!roi) {
      this.previewHint.textContent = "select an ROI to preview its crop";
      this.previewRaw.width = this.previewRaw.height = 0;
      this.previewEnhanced.removeAttribute("src");
      return;
    }
    const [x, y, w, h] = roi.rect;
    this.previewRaw.width = w;
    this.previewRaw.height = h;
    this.previewRaw.getContext("2d")!
      .drawImage(this.frameImage, x, y, w, h, 0, 0, w, h);
    const [ew, eh] = enhancedSize(w, h, roi.kind);
    if (this.session.dirty) {
      this.previewHint.textContent =
        `save first to preview the ${ew}x${eh} enhanced crop`;
      this.previewEnhanced.removeAttribute("src");
      return;
    }
    this.previewHint.textContent = `enhanced ${ew}x${eh}`;
    this.previewEnhanced.src =
      api.enhancedUrl(roi.label, this.frameIndex) + `?v=${this.session.serverVersion}`;
  }

  // --- persistence ------------------------------------------------------

  private async save(): Promise<void> {
    const outcome = await this.session.save();
    switch (outcome.kind) {
      case "saved":
        this.setStatus(`saved as version ${outcome.version}`, "ok");
        break;
      case "rejected":
        this.setStatus(`rejected: ${outcome.errors.length} validation error(s)`,
                       "error");
        break;
      case "stale":
        this.setStatus(`server has version ${outcome.serverVersion}; `
                       + "reload to pick it up", "error");
        break;
      case "retry":
        this.setStatus(`network problem (${outcome.message}); `
                       + "your edits are kept, try again", "warn");
        break;
    }
    this.renderAll();
  }

  private async reload(): Promise<void> {
    await this.session.reload();
    this.selected = -1;
    this.setStatus(`reloaded version ${this.session.serverVersion}`, "ok");
    this.renderAll();
  }

  private setStatus(text: string, cls: "ok" | "warn" | "error"): void {
    this.status.textContent = text;
    this.status.className = cls;
  }
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const app = new App();
app.start().catch((err) => {
  document.body.innerHTML =
    `<pre>failed to start annotator: ${String(err)}\n` +
    `is the server running? (hudtrack serve-annotator ...)</pre>`;
});

// track the cursor for create-drags finishing outside mousemove
document.addEventListener("mousemove", (e) => {
  const canvas = document.getElementById("canvas") as HTMLCanvasElement | null;
  if (!canvas) return;
  const rect = canvas.getBoundingClientRect();
  const x = (e.clientX - rect.left) * (canvas.width / rect.width);
  const y = (e.clientY - rect.top) * (canvas.height / rect.height);
  (app as unknown as { lastX: number; lastY: number }).lastX =
    Math.min(Math.max(x, 0), canvas.width);
  (app as unknown as { lastX: number; lastY: number }).lastY =
    Math.min(Math.max(y, 0), canvas.height);
});
