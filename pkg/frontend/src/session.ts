/**
 * Annotation session state: a working copy of the RoiConfig, a dirty
 * flag, and the save workflow against the server API.
 *
 * The working copy survives crashes through a pluggable key-value store
 * (localStorage in the browser); a failed save never loses edits.
 */

import type { AnnotatorApi, PutResult } from "./api.js";
import type { RoiConfig, RoiKind, RoiSpec, ValidationIssue } from "./model.js";
import { suggestLabel, validateConfig } from "./model.js";
import { MIN_SIZE } from "./geometry.js";
import type { Rect } from "./model.js";

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

const BACKUP_KEY = "hudtrack.roi-config.backup";

export type SaveOutcome =
  | { kind: "saved"; version: number }
  | { kind: "rejected"; errors: ValidationIssue[] }
  | { kind: "stale"; serverVersion: number }
  | { kind: "retry"; message: string };

export class AnnotationSession {
  config: RoiConfig;
  dirty = false;
  lastErrors: ValidationIssue[] = [];

  constructor(private readonly api: AnnotatorApi,
              initial: RoiConfig,
              private readonly store: KeyValueStore | null = null) {
    this.config = structuredClone(initial);
    const backup = this.loadBackup();
    if (backup && backup.version === initial.version) {
      // an unsaved working copy from a previous tab survives reloads
      this.config = backup;
      this.dirty = true;
    }
  }

  get serverVersion(): number {
    return this.config.version;
  }

  addRoi(rect: Rect, kind: RoiKind, intDigits: number | null): RoiSpec | null {
    if (rect[2] < MIN_SIZE || rect[3] < MIN_SIZE) {
      return null; // sub-2-pixel rects are click accidents
    }
    const spec: RoiSpec = {
      label: suggestLabel(kind, this.config.rois),
      kind,
      rect,
      int_digits: intDigits,
    };
    this.config.rois.push(spec);
    this.touch();
    return spec;
  }

  updateRect(index: number, rect: Rect): void {
    const spec = this.config.rois[index];
    if (!spec) return;
    spec.rect = rect;
    this.touch();
  }

  updateRoi(index: number, patch: Partial<Pick<RoiSpec,
            "label" | "kind" | "int_digits">>): void {
    const spec = this.config.rois[index];
    if (!spec) return;
    Object.assign(spec, patch);
    this.touch();
  }

  removeRoi(index: number): void {
    this.config.rois.splice(index, 1);
    this.touch();
  }

  validate() {
    return validateConfig(this.config);
  }

  /** PUT the working copy; never sends a locally-invalid document. */
  async save(): Promise<SaveOutcome> {
    const report = this.validate();
    if (!report.ok) {
      this.lastErrors = report.errors;
      return { kind: "rejected", errors: report.errors };
    }
    const result: PutResult = await this.api.putConfig(this.config);
    switch (result.status) {
      case "ok":
        this.config.version = result.version;
        this.dirty = false;
        this.lastErrors = [];
        this.clearBackup();
        return { kind: "saved", version: result.version };
      case "invalid":
        this.lastErrors = result.errors;
        return { kind: "rejected", errors: result.errors };
      case "stale":
        return { kind: "stale", serverVersion: result.serverVersion };
      case "network_error":
        // keep dirty state and backup: nothing is lost
        return { kind: "retry", message: result.message };
    }
  }

  /** Replace the working copy with the server's document. */
  async reload(): Promise<void> {
    this.config = await this.api.getConfig();
    this.dirty = false;
    this.lastErrors = [];
    this.clearBackup();
  }

  private touch(): void {
    this.dirty = true;
    if (this.store) {
      this.store.setItem(BACKUP_KEY, JSON.stringify(this.config));
    }
  }

  private loadBackup(): RoiConfig | null {
    if (!this.store) return null;
    const raw = this.store.getItem(BACKUP_KEY);
    if (!raw) return null;
    try {
      return JSON.parse(raw) as RoiConfig;
    } catch {
      return null;
    }
  }

  private clearBackup(): void {
    this.store?.removeItem(BACKUP_KEY);
  }
}
