/** Entry point: parse the embedded payload and mount the view for its kind.
 *
 * A malformed or too-new payload shows an error banner instead of a blank
 * page. All data comes from the single JSON script block; the page makes
 * no network requests.
 */

import { App, renderGeneBrowser, renderParetoBrowser, renderSummary,
  showBanner } from "./render";
import { initialState } from "./state";
import { checkVersion, ReportPayload } from "./types";

const STYLE = `
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

export function mount(doc: Document): void {
  const root = doc.getElementById("app") as HTMLElement | null;
  if (!root) return;
  const styleEl = doc.createElement("style");
  styleEl.textContent = STYLE;
  doc.head.appendChild(styleEl);

  const holder = doc.getElementById("mgsr-payload");
  if (!holder || !holder.textContent) {
    showBanner(root, "report payload is missing from this file");
    return;
  }
  let payload: ReportPayload;
  try {
    payload = JSON.parse(holder.textContent) as ReportPayload;
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

  const app: App = {
    payload,
    state: initialState(payload),
    root,
    split: payload.split_names[0] ?? "train",
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

declare const window: (Window & typeof globalThis) | undefined;

if (typeof window !== "undefined" && window.document) {
  mount(window.document);
}
