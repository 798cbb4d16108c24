import { describe, expect, it } from "vitest";

import { choleskySolve, subsetRefit } from "../src/solver";
import type { CrossProdBlock } from "../src/types";

describe("choleskySolve", () => {
  it("solves a well-conditioned SPD system", () => {
    // A = [[4,1],[1,3]], b = [1,2] -> x = [1/11, 7/11]; the 1e-9 Tikhonov
    // jitter bounds the achievable accuracy at ~1e-9 relative
    const x = choleskySolve([[4, 1], [1, 3]], [1, 2]);
    expect(x).not.toBeNull();
    expect(x![0]).toBeCloseTo(1 / 11, 8);
    expect(x![1]).toBeCloseTo(7 / 11, 8);
  });

  it("survives exact collinearity via jitter", () => {
    // duplicated row/column: singular without regularization
    const A = [[2, 2, 1], [2, 2, 1], [1, 1, 3]];
    const x = choleskySolve(A, [1, 1, 2]);
    expect(x).not.toBeNull();
    for (const v of x!) expect(Number.isFinite(v)).toBe(true);
  });

  it("reports failure on a non-finite system instead of crashing", () => {
    expect(choleskySolve([[NaN, 0], [0, 1]], [1, 1])).toBeNull();
  });
});

function blockFromColumns(columns: number[][], y: number[],
  geneIds: number[]): CrossProdBlock {
  const n = y.length;
  const A = [new Array(n).fill(1), ...columns];
  const ata = A.map((ci) => A.map((cj) => dot(ci, cj)));
  const aty = A.map((ci) => dot(ci, y));
  return { gene_ids: geneIds, ata, aty, yty: dot(y, y) };
}

function dot(a: number[], b: number[]): number {
  let s = 0;
  for (let i = 0; i < a.length; i++) s += a[i] * b[i];
  return s;
}

describe("subsetRefit", () => {
  const t1 = [0, 1, 2, 3, 4, 5, 6, 7];
  const t2 = t1.map((v) => v * v);
  const y = t1.map((v, i) => 2 * v - 0.5 * t2[i] + 1);
  const block = blockFromColumns([t1, t2], y, [10, 20]);

  it("recovers an exactly representable model", () => {
    const refit = subsetRefit(block, [10, 20]);
    expect(refit).not.toBeNull();
    expect(refit!.r2).toBeCloseTo(1.0, 9);
    expect(refit!.weights[0]).toBeCloseTo(1.0, 6);
    expect(refit!.weights[1]).toBeCloseTo(2.0, 6);
    expect(refit!.weights[2]).toBeCloseTo(-0.5, 6);
  });

  it("degrades monotonically when a gene is dropped", () => {
    const full = subsetRefit(block, [10, 20])!;
    const partial = subsetRefit(block, [10])!;
    expect(partial.r2).toBeLessThanOrEqual(full.r2 + 1e-12);
  });

  it("returns null for unknown ids or the empty set", () => {
    expect(subsetRefit(block, [])).toBeNull();
    expect(subsetRefit(block, [99])).toBeNull();
  });

  it("is deterministic: same subset, same result", () => {
    const a = subsetRefit(block, [20, 10])!;
    const b = subsetRefit(block, [10, 20])!;
    expect(a.r2).toBe(b.r2);
    expect(a.weights).toEqual(b.weights);
  });
});
