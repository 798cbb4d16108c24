/** Report payload schema (version 1.x) as emitted by the mgsr CLI. */

export interface SplitStats {
  rmse: number | null;
  r2: number | null;
}

export interface ModelRow {
  id: number;
  complexity: number;
  num_genes: number;
  gene_ids: number[];
  equation: string;
  stats: Record<string, SplitStats>;
}

export interface CatalogEntry {
  id: number;
  genotype: string;
  simplified: string;
  complexity: number;
  member_models: number[];
}

export interface PresentImpact {
  gene_id: number;
  position: number;
  r2_if_removed: number | null;
  delta_r2: number | null;
  bloat: boolean;
}

export interface AbsentImpact {
  gene_id: number;
  r2_if_added: number | null;
  gain: number | null;
}

export interface ImpactDoc {
  model_id: number;
  r2_full: number | null;
  present: PresentImpact[];
  absent: AbsentImpact[];
}

export interface CrossProdBlock {
  gene_ids: number[];
  ata: number[][];
  aty: number[];
  yty: number;
}

export interface HistorySeries {
  generation: number[];
  log10_best_rmse: (number | null)[];
  mean_rmse: (number | null)[];
  invalid_count: number[];
  best_r2: (number | null)[];
}

export interface RecSeries {
  model_id: number;
  split: string;
  eps: number[];
  proportion: number[];
}

export interface ReportPayload {
  schema_version: string;
  kind: "summary" | "pareto" | "model" | "genes";
  split_names: string[];
  num_inputs: number;
  var_names: string[];
  focal_model_id: number;
  best_train_id: number;
  models: ModelRow[];
  front_ids: number[];
  gene_catalog: CatalogEntry[];
  history: HistorySeries[];
  gene_impact?: ImpactDoc;
  gene_impact_per_model?: ImpactDoc[];
  crossprod?: CrossProdBlock;
  rec?: RecSeries[];
}

export const SUPPORTED_MAJOR = 1;

/** Major version gate: refuse payloads from a newer schema generation. */
export function checkVersion(payload: { schema_version?: unknown }): string | null {
  const raw = payload.schema_version;
  if (typeof raw !== "string" || !/^\d+\.\d+$/.test(raw)) {
    return "payload has no valid schema_version";
  }
  const major = parseInt(raw.split(".")[0], 10);
  if (major > SUPPORTED_MAJOR) {
    return `payload schema ${raw} is newer than this report UI supports (${SUPPORTED_MAJOR}.x)`;
  }
  return null;
}
