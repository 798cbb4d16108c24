/** UI state: pure transitions over (payload, state).
 *
 * Every displayed number is either a payload passthrough or a subsetRefit
 * result; reloading the page reproduces the initial view because nothing
 * here depends on anything but the payload and the interaction sequence.
 */

import { subsetRefit, SubsetRefit } from "./solver";
import type { ModelRow, ReportPayload } from "./types";

export interface UiState {
  selectedModelId: number;
  toggledGenes: number[]; // sorted, unique
  refit: SubsetRefit | null;
  collinear: boolean;
  sortColumn: string;
  sortDirection: 1 | -1;
}

export function initialState(payload: ReportPayload): UiState {
  const model = findModel(payload, payload.focal_model_id) ?? payload.models[0];
  return withToggled(payload, {
    selectedModelId: model.id,
    toggledGenes: [],
    refit: null,
    collinear: false,
    sortColumn: "r2",
    sortDirection: -1,
  }, uniqueSorted(model.gene_ids));
}

export function findModel(payload: ReportPayload, id: number): ModelRow | undefined {
  return payload.models.find((m) => m.id === id);
}

export function selectModel(payload: ReportPayload, state: UiState, id: number): UiState {
  const model = findModel(payload, id);
  if (!model) return state;
  return withToggled(payload, { ...state, selectedModelId: id },
    uniqueSorted(model.gene_ids));
}

export function toggleGene(payload: ReportPayload, state: UiState, geneId: number): UiState {
  const present = state.toggledGenes.includes(geneId);
  const next = present
    ? state.toggledGenes.filter((g) => g !== geneId)
    : uniqueSorted([...state.toggledGenes, geneId]);
  return withToggled(payload, state, next);
}

function withToggled(payload: ReportPayload, state: UiState, genes: number[]): UiState {
  if (genes.length === 0 || !payload.crossprod) {
    return { ...state, toggledGenes: genes, refit: null, collinear: false };
  }
  const refit = subsetRefit(payload.crossprod, genes);
  return { ...state, toggledGenes: genes, refit, collinear: refit === null };
}

export function setSort(state: UiState, column: string): UiState {
  if (state.sortColumn === column) {
    return { ...state, sortDirection: state.sortDirection === 1 ? -1 : 1 };
  }
  return { ...state, sortColumn: column, sortDirection: -1 };
}

/** Stable sort of model rows for tables; never mutates payload data. */
export function sortedModels(payload: ReportPayload, state: UiState,
  split: string): ModelRow[] {
  const rows = payload.models.slice();
  const dir = state.sortDirection;
  const key = (m: ModelRow): number => {
    if (state.sortColumn === "complexity") return m.complexity;
    if (state.sortColumn === "id") return m.id;
    const stats = m.stats[split];
    return stats && stats.r2 !== null ? stats.r2 : -Infinity;
  };
  return rows
    .map((m, i) => ({ m, i }))
    .sort((a, b) => dir * (key(a.m) - key(b.m)) || a.i - b.i)
    .map((x) => x.m);
}

/** Text form of the toggled gene selection, one id per line. */
export function selectionText(state: UiState): string {
  return state.toggledGenes.map((g) => `${g}\n`).join("");
}

export function exportEnabled(state: UiState): boolean {
  return state.toggledGenes.length > 0;
}

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}
