// Shapes of the scene documents served by `GET /api/scene` (format polyfiber-scene/1).

export const SCENE_FORMAT = "polyfiber-scene/1";

export type BranchKind = "real_axis" | "off_axis" | "vertical_line";

export type SlopeCategory = "NegativeSlope" | "ZeroSlope" | "PositiveSlope";

export interface SceneRoot {
  re: number;
  im: number;
  multiplicity: number;
  residual: number;
  locus_residual: number;
}

export interface SceneCurve {
  kind: BranchKind;
  mirrored: boolean;
  clipped: number[];
  points: [number, number, number][];
}

export interface SceneSlice {
  level: number;
  total_multiplicity: number;
  intersections: SceneRoot[];
}

export interface SceneClassification {
  category: SlopeCategory;
  inflection_x: number;
  inflection_slope: number;
}

export interface SceneMeta {
  format: string;
  coefficient_order: "ascending";
  degree: number;
  x_range: [number, number] | null;
  samples: number | null;
  tolerances: Record<string, number>;
  z_clip: number;
}

export interface SceneDocument {
  format: string;
  polynomial: { coefficients: number[]; order: "ascending" };
  meta: SceneMeta;
  curves: SceneCurve[];
  roots: SceneRoot[];
  slice: SceneSlice | null;
  classification: SceneClassification | null;
}
