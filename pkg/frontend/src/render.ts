/** DOM/SVG rendering: the Pareto population browser and the gene browser.
 *
 * Front membership, best-model marking, and every R² shown in popups come
 * straight from the payload; the only client-side computation is the
 * subset refit, which is labelled a browser estimate.
 */

import { exportEnabled, selectionText, selectModel, setSort, sortedModels,
  toggleGene, UiState } from "./state";
import type { ImpactDoc, ModelRow, ReportPayload } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface App {
  payload: ReportPayload;
  state: UiState;
  root: HTMLElement;
  split: string;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document, tag: K, cls?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function svgEl(doc: Document, tag: string, attrs: Record<string, string | number>) {
  const node = doc.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

export function showBanner(root: HTMLElement, message: string): void {
  const doc = root.ownerDocument;
  const banner = el(doc, "div", "banner", message);
  banner.setAttribute("role", "alert");
  root.textContent = "";
  root.appendChild(banner);
}

function fmt(x: number | null | undefined, digits = 5): string {
  if (x === null || x === undefined || !isFinite(x)) return "n/a";
  return x.toPrecision(digits);
}

// ---------------------------------------------------------------------------
// Pareto population browser

export function renderParetoBrowser(app: App): void {
  const { payload, root } = app;
  const doc = root.ownerDocument;
  const container = el(doc, "div", "pareto-browser");

  if (payload.split_names.length > 1) {
    const select = el(doc, "select", "split-select");
    for (const split of payload.split_names) {
      const opt = el(doc, "option", undefined, split);
      opt.setAttribute("value", split);
      if (split === app.split) opt.setAttribute("selected", "selected");
      select.appendChild(opt);
    }
    select.addEventListener("change", () => {
      app.split = (select as HTMLSelectElement).value;
      rerender(app, renderParetoBrowser);
    });
    container.appendChild(select);
  }

  container.appendChild(scatter(app));
  container.appendChild(modelTable(app));
  root.appendChild(container);
}

function scatter(app: App): SVGElement {
  const { payload, root, split } = app;
  const doc = root.ownerDocument;
  const width = 640;
  const height = 420;
  const pad = 48;
  const svg = svgEl(doc, "svg", {
    viewBox: `0 0 ${width} ${height}`,
    width, height, class: "pareto-scatter", role: "img",
  }) as SVGElement;

  const rows = payload.models.filter((m) => m.stats[split] && m.stats[split].r2 !== null);
  const xs = rows.map((m) => m.complexity);
  const ys = rows.map((m) => 1 - (m.stats[split].r2 as number));
  const xMax = Math.max(1, ...xs);
  const yMax = Math.max(1e-12, ...ys);
  const x = (v: number) => pad + (v / xMax) * (width - 2 * pad);
  const y = (v: number) => height - pad - (Math.max(0, v) / yMax) * (height - 2 * pad);

  svg.appendChild(svgEl(doc, "line",
    { x1: pad, y1: height - pad, x2: width - pad, y2: height - pad, class: "axis" }));
  svg.appendChild(svgEl(doc, "line",
    { x1: pad, y1: pad, x2: pad, y2: height - pad, class: "axis" }));
  const xLabel = svgEl(doc, "text", { x: width / 2, y: height - 10, class: "axis-label" });
  xLabel.textContent = "expressional complexity";
  const yLabel = svgEl(doc, "text",
    { x: 14, y: height / 2, class: "axis-label", transform: `rotate(-90 14 ${height / 2})` });
  yLabel.textContent = `1 - R2 (${split})`;
  svg.appendChild(xLabel);
  svg.appendChild(yLabel);

  const front = new Set(payload.front_ids);
  for (const m of rows) {
    const cls = m.id === payload.best_train_id
      ? "dot best"
      : front.has(m.id) ? "dot front" : "dot rest";
    const dot = svgEl(doc, "circle", {
      cx: x(m.complexity),
      cy: y(1 - (m.stats[split].r2 as number)),
      r: m.id === payload.best_train_id ? 6 : 4,
      class: cls,
      "data-model-id": m.id,
    });
    dot.addEventListener("click", () => showModelPopup(app, m));
    svg.appendChild(dot);
  }
  return svg;
}

function showModelPopup(app: App, model: ModelRow): void {
  const doc = app.root.ownerDocument;
  app.root.querySelectorAll(".popup").forEach((p) => p.remove());
  const popup = el(doc, "div", "popup");
  popup.appendChild(el(doc, "div", "popup-title", `model ${model.id}`));
  popup.appendChild(el(doc, "code", "popup-equation", model.equation));
  const stats = model.stats[app.split];
  if (stats) {
    popup.appendChild(el(doc, "div", "popup-stats",
      `R2 (${app.split}) = ${fmt(stats.r2)}, complexity ${model.complexity}`));
  }
  const close = el(doc, "button", "popup-close", "close");
  close.addEventListener("click", () => popup.remove());
  popup.appendChild(close);
  app.root.appendChild(popup);
}

function modelTable(app: App): HTMLElement {
  const { payload, state, root, split } = app;
  const doc = root.ownerDocument;
  const table = el(doc, "table", "model-table");
  const head = el(doc, "tr");
  for (const column of ["id", "r2", "complexity"]) {
    const th = el(doc, "th", undefined, column === "r2" ? `R2 (${split})` : column);
    th.setAttribute("data-column", column);
    th.addEventListener("click", () => {
      app.state = setSort(app.state, column);
      rerender(app, renderParetoBrowser);
    });
    head.appendChild(th);
  }
  head.appendChild(el(doc, "th", undefined, "model"));
  table.appendChild(head);
  for (const m of sortedModels(payload, state, split)) {
    const tr = el(doc, "tr", payload.front_ids.includes(m.id) ? "front-row" : "");
    tr.appendChild(el(doc, "td", undefined, String(m.id)));
    tr.appendChild(el(doc, "td", undefined, fmt(m.stats[split]?.r2)));
    tr.appendChild(el(doc, "td", undefined, String(m.complexity)));
    const eq = el(doc, "td", "equation");
    eq.appendChild(el(doc, "code", undefined, m.equation));
    tr.appendChild(eq);
    table.appendChild(tr);
  }
  return table;
}

// ---------------------------------------------------------------------------
// gene browser

export function renderGeneBrowser(app: App): void {
  const { payload, state, root } = app;
  const doc = root.ownerDocument;
  const model = payload.models.find((m) => m.id === state.selectedModelId);
  if (!model) {
    showBanner(root, `model ${state.selectedModelId} is not in this report`);
    return;
  }
  const impact = impactFor(payload, model.id);
  const container = el(doc, "div", "gene-browser");
  container.appendChild(el(doc, "h2", undefined,
    `genes of model ${model.id} (click to inspect, toggle for what-if refits)`));

  const picker = el(doc, "select", "model-select");
  for (const m of payload.models) {
    const opt = el(doc, "option", undefined, `model ${m.id}`);
    opt.setAttribute("value", String(m.id));
    if (m.id === model.id) opt.setAttribute("selected", "selected");
    picker.appendChild(opt);
  }
  picker.addEventListener("change", () => {
    app.state = selectModel(payload, app.state, parseInt((picker as HTMLSelectElement).value, 10));
    rerender(app, renderGeneBrowser);
  });
  container.appendChild(picker);

  const inModel = new Set(model.gene_ids);
  container.appendChild(barChart(app, "model-genes",
    payload.gene_catalog.filter((g) => inModel.has(g.id)), impact, true));
  container.appendChild(el(doc, "h3", undefined, "catalog genes not in this model"));
  container.appendChild(barChart(app, "absent-genes",
    payload.gene_catalog.filter((g) => !inModel.has(g.id)), impact, false));

  container.appendChild(refitPanel(app));
  root.appendChild(container);
}

export function impactFor(payload: ReportPayload, modelId: number): ImpactDoc | undefined {
  if (payload.gene_impact && payload.gene_impact.model_id === modelId) {
    return payload.gene_impact;
  }
  return payload.gene_impact_per_model?.find((d) => d.model_id === modelId);
}

function barChart(app: App, cls: string, genes: { id: number; complexity: number;
  simplified: string }[], impact: ImpactDoc | undefined, present: boolean): SVGElement {
  const doc = app.root.ownerDocument;
  const barWidth = 18;
  const gap = 6;
  const height = 140;
  const width = Math.max(120, genes.length * (barWidth + gap) + gap);
  const svg = svgEl(doc, "svg",
    { viewBox: `0 0 ${width} ${height}`, width, height, class: `bars ${cls}` }) as SVGElement;
  const maxC = Math.max(1, ...genes.map((g) => g.complexity));
  genes.forEach((gene, i) => {
    const h = Math.max(3, (gene.complexity / maxC) * (height - 30));
    const row = impact
      ? (present
        ? impact.present.find((p) => p.gene_id === gene.id)
        : impact.absent.find((a) => a.gene_id === gene.id))
      : undefined;
    const bloat = present && row !== undefined && (row as { bloat?: boolean }).bloat === true;
    const toggled = app.state.toggledGenes.includes(gene.id);
    const bar = svgEl(doc, "rect", {
      x: gap + i * (barWidth + gap),
      y: height - 20 - h,
      width: barWidth,
      height: h,
      class: `bar${bloat ? " bloat" : ""}${toggled ? " toggled" : ""}`,
      "data-gene-id": gene.id,
    });
    bar.addEventListener("click", () => showGenePopup(app, gene.id));
    svg.appendChild(bar);
    const label = svgEl(doc, "text", {
      x: gap + i * (barWidth + gap) + barWidth / 2,
      y: height - 6,
      class: "bar-label",
      "text-anchor": "middle",
    });
    label.textContent = String(gene.id);
    svg.appendChild(label);
  });
  return svg;
}

function showGenePopup(app: App, geneId: number): void {
  const { payload, root } = app;
  const doc = root.ownerDocument;
  const gene = payload.gene_catalog.find((g) => g.id === geneId);
  if (!gene) return;
  const impact = impactFor(payload, app.state.selectedModelId);
  root.querySelectorAll(".popup").forEach((p) => p.remove());
  const popup = el(doc, "div", "popup");
  popup.appendChild(el(doc, "div", "popup-title", `gene ${gene.id}`));
  popup.appendChild(el(doc, "code", "popup-equation", gene.simplified));
  if (impact) {
    const present = impact.present.find((p) => p.gene_id === geneId);
    const absent = impact.absent.find((a) => a.gene_id === geneId);
    if (present) {
      popup.appendChild(el(doc, "div", "popup-stats",
        `R2 if removed: ${fmt(present.r2_if_removed)}`
        + (present.bloat ? " (bloat: removal barely matters)" : "")));
    } else if (absent) {
      popup.appendChild(el(doc, "div", "popup-stats",
        `R2 if added: ${fmt(absent.r2_if_added)}`));
    }
  }
  const toggle = el(doc, "button", "popup-toggle",
    app.state.toggledGenes.includes(geneId) ? "remove from selection" : "add to selection");
  toggle.addEventListener("click", () => {
    app.state = toggleGene(payload, app.state, geneId);
    rerender(app, renderGeneBrowser);
  });
  popup.appendChild(toggle);
  const close = el(doc, "button", "popup-close", "close");
  close.addEventListener("click", () => popup.remove());
  popup.appendChild(close);
  root.appendChild(popup);
}

function refitPanel(app: App): HTMLElement {
  const { state, root } = app;
  const doc = root.ownerDocument;
  const panel = el(doc, "div", "refit-panel");
  panel.appendChild(el(doc, "h3", undefined,
    `selection: ${state.toggledGenes.join(", ") || "(empty)"}`));
  if (state.collinear) {
    panel.appendChild(el(doc, "div", "refit-value collinear", "collinear subset"));
  } else if (state.refit) {
    panel.appendChild(el(doc, "div", "refit-value",
      `R2 = ${fmt(state.refit.r2, 8)} (browser estimate)`));
  } else {
    panel.appendChild(el(doc, "div", "refit-value", "no genes selected"));
  }
  const button = el(doc, "button", "export-selection", "export gene ids");
  if (!exportEnabled(state)) button.setAttribute("disabled", "disabled");
  button.addEventListener("click", () => downloadSelection(app));
  panel.appendChild(button);
  return panel;
}

function downloadSelection(app: App): void {
  const doc = app.root.ownerDocument;
  const text = selectionText(app.state);
  const view = doc.defaultView;
  if (!view || typeof view.Blob !== "function" || !view.URL?.createObjectURL) {
    return; // non-browser host: the text is available via selectionText
  }
  const blob = new view.Blob([text], { type: "text/plain" });
  const url = view.URL.createObjectURL(blob);
  const a = doc.createElement("a");
  a.href = url;
  a.download = "gene-selection.txt";
  a.click();
  view.URL.revokeObjectURL(url);
}

// ---------------------------------------------------------------------------
// summary / history

export function renderSummary(app: App): void {
  const { payload, root } = app;
  const doc = root.ownerDocument;
  const container = el(doc, "div", "summary");
  payload.history.forEach((series, runIdx) => {
    container.appendChild(el(doc, "h3", undefined, `run ${runIdx + 1}`));
    container.appendChild(historyChart(doc, series));
  });
  root.appendChild(container);
  renderParetoBrowser(app);
}

function historyChart(doc: Document, series: { generation: number[];
  log10_best_rmse: (number | null)[]; mean_rmse: (number | null)[] }): SVGElement {
  const width = 480;
  const height = 160;
  const svg = svgEl(doc, "svg",
    { viewBox: `0 0 ${width} ${height}`, width, height, class: "history" }) as SVGElement;
  const pts = series.generation
    .map((g, i) => ({ g, v: series.log10_best_rmse[i] }))
    .filter((p): p is { g: number; v: number } => p.v !== null && isFinite(p.v as number));
  if (pts.length === 0) return svg;
  const vMin = Math.min(...pts.map((p) => p.v));
  const vMax = Math.max(...pts.map((p) => p.v), vMin + 1e-9);
  const gMax = Math.max(1, ...pts.map((p) => p.g));
  const path = pts
    .map((p, i) => `${i === 0 ? "M" : "L"}${8 + (p.g / gMax) * (width - 16)},`
      + `${height - 8 - ((p.v - vMin) / (vMax - vMin)) * (height - 16)}`)
    .join(" ");
  svg.appendChild(svgEl(doc, "path", { d: path, class: "best-line", fill: "none" }));
  return svg;
}

export function rerender(app: App, renderer: (a: App) => void): void {
  app.root.textContent = "";
  renderer(app);
}
