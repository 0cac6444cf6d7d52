/**
 * RoiConfig document model plus a client-side mirror of the server's
 * validation rules. The client never PUTs a config its own validator
 * rejects, so a 422 can only mean the mirror drifted from the server.
 */

export type RoiKind =
  | "latitude"
  | "longitude"
  | "altitude"
  | "battery"
  | "airspeed"
  | "vertical_speed"
  | "capacity_used"
  | "auxiliary";

export const ROI_KINDS: RoiKind[] = [
  "latitude", "longitude", "altitude", "battery",
  "airspeed", "vertical_speed", "capacity_used", "auxiliary",
];

export type Rect = [number, number, number, number]; // x, y, w, h

export interface RoiSpec {
  label: string;
  kind: RoiKind;
  rect: Rect;
  int_digits: number | null;
}

export interface RoiConfig {
  version: number;
  frame_width: number;
  frame_height: number;
  rois: RoiSpec[];
}

export interface ValidationIssue {
  label: string;
  code: string;
  message: string;
}

export interface ValidationReport {
  ok: boolean;
  errors: ValidationIssue[];
  warnings: ValidationIssue[];
}

export function isCoordinate(kind: RoiKind): boolean {
  return kind === "latitude" || kind === "longitude";
}

/** Mirror of the server-side structural checks (same codes). */
export function validateConfig(cfg: RoiConfig): ValidationReport {
  const errors: ValidationIssue[] = [];
  const warnings: ValidationIssue[] = [];
  const seen = new Set<string>();
  const coordCounts: Record<string, number> = { latitude: 0, longitude: 0 };

  for (const spec of cfg.rois) {
    const [x, y, w, h] = spec.rect;
    if (w < 1 || h < 1) {
      errors.push({
        label: spec.label, code: "EmptyRect",
        message: `rect [${spec.rect}] has non-positive size`,
      });
    } else if (x < 0 || y < 0 || x + w > cfg.frame_width
               || y + h > cfg.frame_height) {
      errors.push({
        label: spec.label, code: "OutOfBounds",
        message: `rect [${spec.rect}] exceeds frame `
          + `${cfg.frame_width}x${cfg.frame_height}`,
      });
    }
    if (seen.has(spec.label)) {
      errors.push({
        label: spec.label, code: "DuplicateLabel",
        message: `label '${spec.label}' used more than once`,
      });
    }
    seen.add(spec.label);
    if (isCoordinate(spec.kind)) {
      coordCounts[spec.kind] = (coordCounts[spec.kind] ?? 0) + 1;
      if (spec.int_digits === null) {
        errors.push({
          label: spec.label, code: "MissingIntDigits",
          message: "coordinate ROIs need int_digits",
        });
      } else if (spec.int_digits < 1) {
        errors.push({
          label: spec.label, code: "BadIntDigits",
          message: `int_digits must be >= 1, got ${spec.int_digits}`,
        });
      }
    }
  }
  for (const kind of ["latitude", "longitude"]) {
    const n = coordCounts[kind] ?? 0;
    if (n > 1) {
      errors.push({
        label: "", code: "DuplicateKind",
        message: `at most one ${kind} ROI allowed, found ${n}`,
      });
    }
  }
  if ((coordCounts["latitude"] ?? 0) === 0
      || (coordCounts["longitude"] ?? 0) === 0) {
    warnings.push({
      label: "", code: "NoCoordinateRois",
      message: "no latitude/longitude ROIs; spatial analysis disabled",
    });
  }
  return { ok: errors.length === 0, errors, warnings };
}

/** Enhancement chain constants: coordinate fields pad 15 and scale 6x,
 *  auxiliary fields pad 5 and scale 2x. */
export function enhancedSize(w: number, h: number, kind: RoiKind):
    [number, number] {
  const pad = isCoordinate(kind) ? 15 : 5;
  const scale = isCoordinate(kind) ? 6 : 2;
  return [(w + 2 * pad) * scale, (h + 2 * pad) * scale];
}

/** Auto-suggest a unique label for a new ROI of the given kind. */
export function suggestLabel(kind: RoiKind, existing: RoiSpec[]): string {
  const base: Record<RoiKind, string> = {
    latitude: "lat", longitude: "lon", altitude: "alt", battery: "battery",
    airspeed: "airspeed", vertical_speed: "vspeed",
    capacity_used: "capacity", auxiliary: "aux",
  };
  const taken = new Set(existing.map((s) => s.label));
  let candidate = base[kind];
  let n = 2;
  while (taken.has(candidate)) {
    candidate = `${base[kind]}${n}`;
    n += 1;
  }
  return candidate;
}
