/** Dense symmetric solves for the embedded cross-product block.
 *
 * Subset refits re-solve the normal equations (A^T A)|_S b = (A^T y)|_S
 * with a Cholesky factorization. A Tikhonov jitter of 1e-9 (relative to
 * the mean diagonal magnitude, so the fallback is scale-invariant) keeps
 * collinear subsets solvable; results are labelled browser estimates and
 * the payload contract bounds their divergence from the engine at 1e-6.
 */

import type { CrossProdBlock } from "./types";

export const JITTER = 1e-9;

export interface SubsetRefit {
  geneIds: number[];
  weights: number[]; // bias first
  r2: number;
}

/** Solve A x = b for symmetric positive (semi)definite A; null when the
 * factorization fails even with jitter. */
export function choleskySolve(A: number[][], b: number[], jitter = JITTER): number[] | null {
  const n = A.length;
  let diagScale = 0;
  for (let i = 0; i < n; i++) diagScale += Math.abs(A[i][i]);
  diagScale = diagScale > 0 ? diagScale / n : 1;
  const lam = jitter * diagScale;

  const L: number[][] = [];
  for (let i = 0; i < n; i++) {
    L.push(A[i].slice());
    L[i][i] += lam;
  }
  for (let j = 0; j < n; j++) {
    let d = L[j][j];
    for (let k = 0; k < j; k++) d -= L[j][k] * L[j][k];
    if (!(d > 0) || !isFinite(d)) return null;
    const s = Math.sqrt(d);
    L[j][j] = s;
    for (let i = j + 1; i < n; i++) {
      let value = L[i][j];
      for (let k = 0; k < j; k++) value -= L[i][k] * L[j][k];
      L[i][j] = value / s;
    }
  }
  // forward substitution L z = b
  const z = new Array(n).fill(0);
  for (let i = 0; i < n; i++) {
    let value = b[i];
    for (let k = 0; k < i; k++) value -= L[i][k] * z[k];
    z[i] = value / L[i][i];
  }
  // back substitution L^T x = z
  const x = new Array(n).fill(0);
  for (let i = n - 1; i >= 0; i--) {
    let value = z[i];
    for (let k = i + 1; k < n; k++) value -= L[k][i] * x[k];
    x[i] = value / L[i][i];
  }
  return x.every(isFinite) ? x : null;
}

/** Least-squares refit of a gene-id subset from the cross-product block.
 * The subset is canonicalized (sorted, deduplicated) first, so a given set
 * of genes always produces bit-identical results. */
export function subsetRefit(block: CrossProdBlock, geneIds: number[]): SubsetRefit | null {
  const ids = [...new Set(geneIds)].sort((a, b) => a - b);
  if (ids.length === 0) return null;
  const positions = ids.map((id) => block.gene_ids.indexOf(id));
  if (positions.some((p) => p < 0)) return null;
  const idx = [0, ...positions.map((p) => p + 1)];

  const A = idx.map((i) => idx.map((j) => block.ata[i][j]));
  const rhs = idx.map((i) => block.aty[i]);
  const weights = choleskySolve(A, rhs);
  if (weights === null) return null;

  const n = block.ata[0][0];
  const yMean = block.aty[0] / n;
  const sst = block.yty - n * yMean * yMean;
  let fit = 0; // b^T A b
  for (let i = 0; i < idx.length; i++) {
    for (let j = 0; j < idx.length; j++) {
      fit += weights[i] * A[i][j] * weights[j];
    }
  }
  let cross = 0; // b^T (A^T y)
  for (let i = 0; i < idx.length; i++) cross += weights[i] * rhs[i];
  const sse = block.yty - 2 * cross + fit;
  const r2 = sst > 0 ? 1 - sse / sst : NaN;
  if (!isFinite(r2)) return null;
  return { geneIds: ids, weights, r2 };
}
