"use strict";
(() => {
  // src/solver.ts
  var JITTER = 1e-9;
  function choleskySolve(A, b, jitter = JITTER) {
    const n = A.length;
    let diagScale = 0;
    for (let i = 0; i < n; i++) diagScale += Math.abs(A[i][i]);
    diagScale = diagScale > 0 ? diagScale / n : 1;
    const lam = jitter * diagScale;
    const L = [];
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
    const z = new Array(n).fill(0);
    for (let i = 0; i < n; i++) {
      let value = b[i];
      for (let k = 0; k < i; k++) value -= L[i][k] * z[k];
      z[i] = value / L[i][i];
    }
    const x = new Array(n).fill(0);
    for (let i = n - 1; i >= 0; i--) {
      let value = z[i];
      for (let k = i + 1; k < n; k++) value -= L[k][i] * x[k];
      x[i] = value / L[i][i];
    }
    return x.every(isFinite) ? x : null;
  }
  function subsetRefit(block, geneIds) {
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
    let fit = 0;
    for (let i = 0; i < idx.length; i++) {
      for (let j = 0; j < idx.length; j++) {
        fit += weights[i] * A[i][j] * weights[j];
      }
    }
    let cross = 0;
    for (let i = 0; i < idx.length; i++) cross += weights[i] * rhs[i];
    const sse = block.yty - 2 * cross + fit;
    const r2 = sst > 0 ? 1 - sse / sst : NaN;
    if (!isFinite(r2)) return null;
    return { geneIds: ids, weights, r2 };
  }

  // src/state.ts
  function initialState(payload) {
    const model = findModel(payload, payload.focal_model_id) ?? payload.models[0];
    return withToggled(payload, {
      selectedModelId: model.id,
      toggledGenes: [],
      refit: null,
      collinear: false,
      sortColumn: "r2",
      sortDirection: -1
    }, uniqueSorted(model.gene_ids));
  }
  function findModel(payload, id) {
    return payload.models.find((m) => m.id === id);
  }
  function selectModel(payload, state, id) {
    const model = findModel(payload, id);
    if (!model) return state;
    return withToggled(
      payload,
      { ...state, selectedModelId: id },
      uniqueSorted(model.gene_ids)
    );
  }
  function toggleGene(payload, state, geneId) {
    const present = state.toggledGenes.includes(geneId);
    const next = present ? state.toggledGenes.filter((g) => g !== geneId) : uniqueSorted([...state.toggledGenes, geneId]);
    return withToggled(payload, state, next);
  }
  function withToggled(payload, state, genes) {
    if (genes.length === 0 || !payload.crossprod) {
      return { ...state, toggledGenes: genes, refit: null, collinear: false };
    }
    const refit = subsetRefit(payload.crossprod, genes);
    return { ...state, toggledGenes: genes, refit, collinear: refit === null };
  }
  function setSort(state, column) {
    if (state.sortColumn === column) {
      return { ...state, sortDirection: state.sortDirection === 1 ? -1 : 1 };
    }
    return { ...state, sortColumn: column, sortDirection: -1 };
  }
  function sortedModels(payload, state, split) {
    const rows = payload.models.slice();
    const dir = state.sortDirection;
    const key = (m) => {
      if (state.sortColumn === "complexity") return m.complexity;
      if (state.sortColumn === "id") return m.id;
      const stats = m.stats[split];
      return stats && stats.r2 !== null ? stats.r2 : -Infinity;
    };
    return rows.map((m, i) => ({ m, i })).sort((a, b) => dir * (key(a.m) - key(b.m)) || a.i - b.i).map((x) => x.m);
  }
  function selectionText(state) {
    return state.toggledGenes.map((g) => `${g}
`).join("");
  }
  function exportEnabled(state) {
    return state.toggledGenes.length > 0;
  }
  function uniqueSorted(values) {
    return [...new Set(values)].sort((a, b) => a - b);
  }

  // src/render.ts
  var SVG_NS = "http://www.w3.org/2000/svg";
  function el(doc, tag, cls, text) {
    const node = doc.createElement(tag);
    if (cls) node.className = cls;
    if (text !== void 0) node.textContent = text;
    return node;
  }
  function svgEl(doc, tag, attrs) {
    const node = doc.createElementNS(SVG_NS, tag);
    for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
    return node;
  }
  function showBanner(root, message) {
    const doc = root.ownerDocument;
    const banner = el(doc, "div", "banner", message);
    banner.setAttribute("role", "alert");
    root.textContent = "";
    root.appendChild(banner);
  }
  function fmt(x, digits = 5) {
    if (x === null || x === void 0 || !isFinite(x)) return "n/a";
    return x.toPrecision(digits);
  }
  function renderParetoBrowser(app) {
    const { payload, root } = app;
    const doc = root.ownerDocument;
    const container = el(doc, "div", "pareto-browser");
    if (payload.split_names.length > 1) {
      const select = el(doc, "select", "split-select");
      for (const split of payload.split_names) {
        const opt = el(doc, "option", void 0, split);
        opt.setAttribute("value", split);
        if (split === app.split) opt.setAttribute("selected", "selected");
        select.appendChild(opt);
      }
      select.addEventListener("change", () => {
        app.split = select.value;
        rerender(app, renderParetoBrowser);
      });
      container.appendChild(select);
    }
    container.appendChild(scatter(app));
    container.appendChild(modelTable(app));
    root.appendChild(container);
  }
  function scatter(app) {
    const { payload, root, split } = app;
    const doc = root.ownerDocument;
    const width = 640;
    const height = 420;
    const pad = 48;
    const svg = svgEl(doc, "svg", {
      viewBox: `0 0 ${width} ${height}`,
      width,
      height,
      class: "pareto-scatter",
      role: "img"
    });
    const rows = payload.models.filter((m) => m.stats[split] && m.stats[split].r2 !== null);
    const xs = rows.map((m) => m.complexity);
    const ys = rows.map((m) => 1 - m.stats[split].r2);
    const xMax = Math.max(1, ...xs);
    const yMax = Math.max(1e-12, ...ys);
    const x = (v) => pad + v / xMax * (width - 2 * pad);
    const y = (v) => height - pad - Math.max(0, v) / yMax * (height - 2 * pad);
    svg.appendChild(svgEl(
      doc,
      "line",
      { x1: pad, y1: height - pad, x2: width - pad, y2: height - pad, class: "axis" }
    ));
    svg.appendChild(svgEl(
      doc,
      "line",
      { x1: pad, y1: pad, x2: pad, y2: height - pad, class: "axis" }
    ));
    const xLabel = svgEl(doc, "text", { x: width / 2, y: height - 10, class: "axis-label" });
    xLabel.textContent = "expressional complexity";
    const yLabel = svgEl(
      doc,
      "text",
      { x: 14, y: height / 2, class: "axis-label", transform: `rotate(-90 14 ${height / 2})` }
    );
    yLabel.textContent = `1 - R2 (${split})`;
    svg.appendChild(xLabel);
    svg.appendChild(yLabel);
    const front = new Set(payload.front_ids);
    for (const m of rows) {
      const cls = m.id === payload.best_train_id ? "dot best" : front.has(m.id) ? "dot front" : "dot rest";
      const dot = svgEl(doc, "circle", {
        cx: x(m.complexity),
        cy: y(1 - m.stats[split].r2),
        r: m.id === payload.best_train_id ? 6 : 4,
        class: cls,
        "data-model-id": m.id
      });
      dot.addEventListener("click", () => showModelPopup(app, m));
      svg.appendChild(dot);
    }
    return svg;
  }
  function showModelPopup(app, model) {
    const doc = app.root.ownerDocument;
    app.root.querySelectorAll(".popup").forEach((p) => p.remove());
    const popup = el(doc, "div", "popup");
    popup.appendChild(el(doc, "div", "popup-title", `model ${model.id}`));
    popup.appendChild(el(doc, "code", "popup-equation", model.equation));
    const stats = model.stats[app.split];
    if (stats) {
      popup.appendChild(el(
        doc,
        "div",
        "popup-stats",
        `R2 (${app.split}) = ${fmt(stats.r2)}, complexity ${model.complexity}`
      ));
    }
    const close = el(doc, "button", "popup-close", "close");
    close.addEventListener("click", () => popup.remove());
    popup.appendChild(close);
    app.root.appendChild(popup);
  }
  function modelTable(app) {
    const { payload, state, root, split } = app;
    const doc = root.ownerDocument;
    const table = el(doc, "table", "model-table");
    const head = el(doc, "tr");
    for (const column of ["id", "r2", "complexity"]) {
      const th = el(doc, "th", void 0, column === "r2" ? `R2 (${split})` : column);
      th.setAttribute("data-column", column);
      th.addEventListener("click", () => {
        app.state = setSort(app.state, column);
        rerender(app, renderParetoBrowser);
      });
      head.appendChild(th);
    }
    head.appendChild(el(doc, "th", void 0, "model"));
    table.appendChild(head);
    for (const m of sortedModels(payload, state, split)) {
      const tr = el(doc, "tr", payload.front_ids.includes(m.id) ? "front-row" : "");
      tr.appendChild(el(doc, "td", void 0, String(m.id)));
      tr.appendChild(el(doc, "td", void 0, fmt(m.stats[split]?.r2)));
      tr.appendChild(el(doc, "td", void 0, String(m.complexity)));
      const eq = el(doc, "td", "equation");
      eq.appendChild(el(doc, "code", void 0, m.equation));
      tr.appendChild(eq);
      table.appendChild(tr);
    }
    return table;
  }
  function renderGeneBrowser(app) {
    const { payload, state, root } = app;
    const doc = root.ownerDocument;
    const model = payload.models.find((m) => m.id === state.selectedModelId);
    if (!model) {
      showBanner(root, `model ${state.selectedModelId} is not in this report`);
      return;
    }
    const impact = impactFor(payload, model.id);
    const container = el(doc, "div", "gene-browser");
    container.appendChild(el(
      doc,
      "h2",
      void 0,
      `genes of model ${model.id} (click to inspect, toggle for what-if refits)`
    ));
    const picker = el(doc, "select", "model-select");
    for (const m of payload.models) {
      const opt = el(doc, "option", void 0, `model ${m.id}`);
      opt.setAttribute("value", String(m.id));
      if (m.id === model.id) opt.setAttribute("selected", "selected");
      picker.appendChild(opt);
    }
    picker.addEventListener("change", () => {
      app.state = selectModel(payload, app.state, parseInt(picker.value, 10));
      rerender(app, renderGeneBrowser);
    });
    container.appendChild(picker);
    const inModel = new Set(model.gene_ids);
    container.appendChild(barChart(
      app,
      "model-genes",
      payload.gene_catalog.filter((g) => inModel.has(g.id)),
      impact,
      true
    ));
    container.appendChild(el(doc, "h3", void 0, "catalog genes not in this model"));
    container.appendChild(barChart(
      app,
      "absent-genes",
      payload.gene_catalog.filter((g) => !inModel.has(g.id)),
      impact,
      false
    ));
    container.appendChild(refitPanel(app));
    root.appendChild(container);
  }
  function impactFor(payload, modelId) {
    if (payload.gene_impact && payload.gene_impact.model_id === modelId) {
      return payload.gene_impact;
    }
    return payload.gene_impact_per_model?.find((d) => d.model_id === modelId);
  }
  function barChart(app, cls, genes, impact, present) {
    const doc = app.root.ownerDocument;
    const barWidth = 18;
    const gap = 6;
    const height = 140;
    const width = Math.max(120, genes.length * (barWidth + gap) + gap);
    const svg = svgEl(
      doc,
      "svg",
      { viewBox: `0 0 ${width} ${height}`, width, height, class: `bars ${cls}` }
    );
    const maxC = Math.max(1, ...genes.map((g) => g.complexity));
    genes.forEach((gene, i) => {
      const h = Math.max(3, gene.complexity / maxC * (height - 30));
      const row = impact ? present ? impact.present.find((p) => p.gene_id === gene.id) : impact.absent.find((a) => a.gene_id === gene.id) : void 0;
      const bloat = present && row !== void 0 && row.bloat === true;
      const toggled = app.state.toggledGenes.includes(gene.id);
      const bar = svgEl(doc, "rect", {
        x: gap + i * (barWidth + gap),
        y: height - 20 - h,
        width: barWidth,
        height: h,
        class: `bar${bloat ? " bloat" : ""}${toggled ? " toggled" : ""}`,
        "data-gene-id": gene.id
      });
      bar.addEventListener("click", () => showGenePopup(app, gene.id));
      svg.appendChild(bar);
      const label = svgEl(doc, "text", {
        x: gap + i * (barWidth + gap) + barWidth / 2,
        y: height - 6,
        class: "bar-label",
        "text-anchor": "middle"
      });
      label.textContent = String(gene.id);
      svg.appendChild(label);
    });
    return svg;
  }
  function showGenePopup(app, geneId) {
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
        popup.appendChild(el(
          doc,
          "div",
          "popup-stats",
          `R2 if removed: ${fmt(present.r2_if_removed)}` + (present.bloat ? " (bloat: removal barely matters)" : "")
        ));
      } else if (absent) {
        popup.appendChild(el(
          doc,
          "div",
          "popup-stats",
          `R2 if added: ${fmt(absent.r2_if_added)}`
        ));
      }
    }
    const toggle = el(
      doc,
      "button",
      "popup-toggle",
      app.state.toggledGenes.includes(geneId) ? "remove from selection" : "add to selection"
    );
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
  function refitPanel(app) {
    const { state, root } = app;
    const doc = root.ownerDocument;
    const panel = el(doc, "div", "refit-panel");
    panel.appendChild(el(
      doc,
      "h3",
      void 0,
      `selection: ${state.toggledGenes.join(", ") || "(empty)"}`
    ));
    if (state.collinear) {
      panel.appendChild(el(doc, "div", "refit-value collinear", "collinear subset"));
    } else if (state.refit) {
      panel.appendChild(el(
        doc,
        "div",
        "refit-value",
        `R2 = ${fmt(state.refit.r2, 8)} (browser estimate)`
      ));
    } else {
      panel.appendChild(el(doc, "div", "refit-value", "no genes selected"));
    }
    const button = el(doc, "button", "export-selection", "export gene ids");
    if (!exportEnabled(state)) button.setAttribute("disabled", "disabled");
    button.addEventListener("click", () => downloadSelection(app));
    panel.appendChild(button);
    return panel;
  }
  function downloadSelection(app) {
    const doc = app.root.ownerDocument;
    const text = selectionText(app.state);
    const view = doc.defaultView;
    if (!view || typeof view.Blob !== "function" || !view.URL?.createObjectURL) {
      return;
    }
    const blob = new view.Blob([text], { type: "text/plain" });
    const url = view.URL.createObjectURL(blob);
    const a = doc.createElement("a");
    a.href = url;
    a.download = "gene-selection.txt";
    a.click();
    view.URL.revokeObjectURL(url);
  }
  function renderSummary(app) {
    const { payload, root } = app;
    const doc = root.ownerDocument;
    const container = el(doc, "div", "summary");
    payload.history.forEach((series, runIdx) => {
      container.appendChild(el(doc, "h3", void 0, `run ${runIdx + 1}`));
      container.appendChild(historyChart(doc, series));
    });
    root.appendChild(container);
    renderParetoBrowser(app);
  }
  function historyChart(doc, series) {
    const width = 480;
    const height = 160;
    const svg = svgEl(
      doc,
      "svg",
      { viewBox: `0 0 ${width} ${height}`, width, height, class: "history" }
    );
    const pts = series.generation.map((g, i) => ({ g, v: series.log10_best_rmse[i] })).filter((p) => p.v !== null && isFinite(p.v));
    if (pts.length === 0) return svg;
    const vMin = Math.min(...pts.map((p) => p.v));
    const vMax = Math.max(...pts.map((p) => p.v), vMin + 1e-9);
    const gMax = Math.max(1, ...pts.map((p) => p.g));
    const path = pts.map((p, i) => `${i === 0 ? "M" : "L"}${8 + p.g / gMax * (width - 16)},${height - 8 - (p.v - vMin) / (vMax - vMin) * (height - 16)}`).join(" ");
    svg.appendChild(svgEl(doc, "path", { d: path, class: "best-line", fill: "none" }));
    return svg;
  }
  function rerender(app, renderer) {
    app.root.textContent = "";
    renderer(app);
  }

  // src/types.ts
  var SUPPORTED_MAJOR = 1;
  function checkVersion(payload) {
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

  // src/main.ts
  var STYLE = `
.pareto-scatter .dot.front { fill: #2e8b57; cursor: pointer; }
.pareto-scatter .dot.rest { fill: #4169e1; cursor: pointer; }
.pareto-scatter .dot.best { fill: #ffffff; stroke: #cc0000; stroke-width: 2; cursor: pointer; }
.pareto-scatter .axis { stroke: #888; }
.pareto-scatter .axis-label { font-size: 12px; fill: #444; }
.bars .bar { fill: #4169e1; cursor: pointer; }
.absent-genes .bar { fill: #e8862d; }
.bars .bar.bloat { fill: #d4b106; stroke: #8a6d00; stroke-dasharray: 3 2; }
.bars .bar.toggled { stroke: #111; stroke-width: 2; }
.bar-label { font-size: 10px; fill: #333; }
.popup { background: #fff8c4; border: 1px solid #b8a200; padding: 0.6rem;
         margin-top: 0.5rem; max-width: 42rem; }
.popup code { display: block; margin: 0.4rem 0; white-space: pre-wrap; }
.model-table { border-collapse: collapse; margin-top: 0.8rem; }
.model-table th { cursor: pointer; text-decoration: underline; }
.model-table td, .model-table th { border: 1px solid #ccc; padding: 2px 8px; }
.model-table .front-row td { background: #e7f6ec; }
.refit-panel { margin-top: 0.8rem; padding: 0.5rem; border: 1px solid #aaa; }
.refit-value.collinear { color: #b00; }
.history .best-line { stroke: #2e4a8b; stroke-width: 1.5; }
`;
  function mount(doc) {
    const root = doc.getElementById("app");
    if (!root) return;
    const styleEl = doc.createElement("style");
    styleEl.textContent = STYLE;
    doc.head.appendChild(styleEl);
    const holder = doc.getElementById("mgsr-payload");
    if (!holder || !holder.textContent) {
      showBanner(root, "report payload is missing from this file");
      return;
    }
    let payload;
    try {
      payload = JSON.parse(holder.textContent);
    } catch (err) {
      showBanner(root, `report payload is not valid JSON: ${String(err)}`);
      return;
    }
    const versionProblem = checkVersion(payload);
    if (versionProblem) {
      showBanner(root, versionProblem);
      return;
    }
    if (!Array.isArray(payload.models) || payload.models.length === 0) {
      showBanner(root, "report payload contains no models");
      return;
    }
    const app = {
      payload,
      state: initialState(payload),
      root,
      split: payload.split_names[0] ?? "train"
    };
    root.textContent = "";
    try {
      if (payload.kind === "genes") {
        renderGeneBrowser(app);
      } else if (payload.kind === "summary") {
        renderSummary(app);
      } else {
        renderParetoBrowser(app);
        if (payload.kind === "model") {
          renderGeneBrowser(app);
        }
      }
    } catch (err) {
      showBanner(root, `report failed to render: ${String(err)}`);
    }
  }
  if (typeof window !== "undefined" && window.document) {
    mount(window.document);
  }
})();
