import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { exportEnabled, initialState, selectionText, selectModel, setSort,
  sortedModels, toggleGene } from "../src/state";
import type { ReportPayload } from "../src/types";

const payload: ReportPayload = JSON.parse(
  readFileSync(join(__dirname, "fixtures", "payload_genes.json"), "utf8"));

describe("UiState", () => {
  it("starts on the focal model with its gene set toggled", () => {
    const state = initialState(payload);
    expect(state.selectedModelId).toBe(payload.focal_model_id);
    const model = payload.models.find((m) => m.id === payload.focal_model_id)!;
    expect(state.toggledGenes).toEqual([...new Set(model.gene_ids)].sort((a, b) => a - b));
    expect(state.refit).not.toBeNull();
  });

  it("removing then re-adding a gene restores the exact refit", () => {
    const state = initialState(payload);
    const gene = state.toggledGenes[0];
    const before = state.refit!.r2;
    const removed = toggleGene(payload, state, gene);
    const restored = toggleGene(payload, removed, gene);
    expect(restored.toggledGenes).toEqual(state.toggledGenes);
    expect(restored.refit!.r2).toBe(before);
  });

  it("refit always corresponds to the toggled set", () => {
    let state = initialState(payload);
    const extra = payload.gene_catalog.find(
      (g) => !state.toggledGenes.includes(g.id));
    if (extra) {
      state = toggleGene(payload, state, extra.id);
      expect(state.toggledGenes).toContain(extra.id);
      expect(state.refit!.geneIds).toEqual(state.toggledGenes);
    }
  });

  it("empty selection disables export", () => {
    let state = initialState(payload);
    for (const gene of [...state.toggledGenes]) {
      state = toggleGene(payload, state, gene);
    }
    expect(state.toggledGenes).toEqual([]);
    expect(state.refit).toBeNull();
    expect(exportEnabled(state)).toBe(false);
  });

  it("selection text is one id per line", () => {
    let state = initialState(payload);
    for (const gene of [...state.toggledGenes]) {
      state = toggleGene(payload, state, gene);
    }
    state = toggleGene(payload, state, 3);
    state = toggleGene(payload, state, 7);
    expect(selectionText(state)).toBe("3\n7\n");
    expect(exportEnabled(state)).toBe(true);
  });

  it("selecting another model swaps the toggled set", () => {
    const state = initialState(payload);
    const other = payload.models.find((m) => m.id !== state.selectedModelId)!;
    const next = selectModel(payload, state, other.id);
    expect(next.selectedModelId).toBe(other.id);
    expect(next.toggledGenes).toEqual(
      [...new Set(other.gene_ids)].sort((a, b) => a - b));
  });

  it("sorts stably and never mutates the payload", () => {
    const state = initialState(payload);
    const originalOrder = payload.models.map((m) => m.id);
    const byR2 = sortedModels(payload, state, "train");
    for (let i = 1; i < byR2.length; i++) {
      const a = byR2[i - 1].stats.train?.r2 ?? -Infinity;
      const b = byR2[i].stats.train?.r2 ?? -Infinity;
      expect(a >= b).toBe(true);
    }
    expect(payload.models.map((m) => m.id)).toEqual(originalOrder);

    const flipped = setSort(state, "r2"); // same column: direction flips
    const ascending = sortedModels(payload, flipped, "train");
    expect(ascending[0].id).toBe(byR2[byR2.length - 1].id);

    const byComplexity = sortedModels(payload, setSort(state, "complexity"), "train");
    for (let i = 1; i < byComplexity.length; i++) {
      expect(byComplexity[i - 1].complexity >= byComplexity[i].complexity).toBe(true);
    }
  });
});
