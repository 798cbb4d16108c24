"""Report payload construction and standalone HTML emission.

The payload is a single JSON document embedded in the HTML file together
with the UI bundle, so reports open in a browser with no network access.
The cross-product block (A^T A, A^T y, y^T y over the catalog's gene
response columns, bias first) lets the UI re-solve weight fits for
arbitrary gene subsets without shipping the dataset.
"""

from __future__ import annotations

import importlib.resources
import json
import math

import numpy as np

from .analyze import (
    GeneCatalog,
    GeneImpact,
    gene_impact,
    evaluate_population_models,
    pareto_front_ids,
    rec_curve,
    run_summary,
    unique_genes,
)
from .dataset import Dataset
from .errors import ModelLookupError
from .evolve import Population
from .export import model_equation
from . import tree as T

PAYLOAD_SCHEMA_VERSION = "1.0"
DEFAULT_MAX_CROSSPROD_GENES = 200

REPORT_KINDS = ("summary", "pareto", "model", "genes")


def _clean(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _model_rows(models, catalog: GeneCatalog | None):
    rows = []
    for i, m in enumerate(models):
        if m is None:
            continue
        rows.append({
            "id": i + 1,
            "complexity": m.complexity,
            "num_genes": len(m.genes),
            "gene_ids": catalog.ids_for_genes(m.genes) if catalog else [],
            "equation": model_equation(m),
            "stats": {
                split: {"rmse": _clean(s.rmse), "r2": _clean(s.r2)}
                for split, s in sorted(m.stats.items())
            },
        })
    return rows


def _impact_doc(impact: GeneImpact) -> dict:
    return {
        "model_id": impact.model_id,
        "r2_full": _clean(impact.r2_full),
        "present": [
            {
                "gene_id": p.gene_id,
                "position": p.position,
                "r2_if_removed": _clean(p.r2_if_removed),
                "delta_r2": _clean(p.delta_r2),
                "bloat": p.bloat,
            }
            for p in impact.present
        ],
        "absent": [
            {
                "gene_id": a.gene_id,
                "r2_if_added": _clean(a.r2_if_added),
                "gain": _clean(a.gain),
            }
            for a in impact.absent
        ],
    }


def crossprod_block(catalog: GeneCatalog, dataset: Dataset,
                    impact: GeneImpact | None,
                    max_genes: int = DEFAULT_MAX_CROSSPROD_GENES) -> dict:
    """(A^T A, A^T y, y^T y) over [1, t_g1, ..., t_gU] on the training rows.

    When the catalog exceeds max_genes, the genes with the largest impact
    magnitude relative to the focal model are kept.
    """
    ids = [e.gene_id for e in catalog.entries]
    if len(ids) > max_genes:
        magnitude = {gid: 0.0 for gid in ids}
        if impact is not None:
            for p in impact.present:
                magnitude[p.gene_id] = abs(p.delta_r2)
            for a in impact.absent:
                magnitude[a.gene_id] = abs(a.gain)
        ids = sorted(sorted(ids), key=lambda g: -magnitude[g])[:max_genes]
        ids.sort()
    X, y = dataset.X_train, dataset.y_train
    cols = [np.ones(len(y))]
    kept = []
    for gid in ids:
        with np.errstate(all="ignore"):
            col = T.eval_tree(catalog.by_id(gid).genotype, X)
        if np.isfinite(col).all():
            cols.append(col)
            kept.append(gid)
    A = np.column_stack(cols)
    return {
        "gene_ids": kept,
        "ata": (A.T @ A).tolist(),
        "aty": (A.T @ y).tolist(),
        "yty": float(y @ y),
    }


def build_payload(pop: Population, dataset: Dataset, kind: str = "pareto",
                  focal_model: int | None = None,
                  max_crossprod_genes: int = DEFAULT_MAX_CROSSPROD_GENES,
                  rec_model_ids: list[int] | None = None) -> dict:
    """Assemble the report payload consumed by the embedded UI."""
    if kind not in REPORT_KINDS:
        raise ModelLookupError(f"unknown report kind {kind!r}")
    models = evaluate_population_models(pop, dataset)
    valid_ids = [i + 1 for i, m in enumerate(models) if m is not None]
    if not valid_ids:
        raise ModelLookupError("population has no valid models to report")

    best_train = min(valid_ids, key=lambda i: models[i - 1].rmse_train)
    if focal_model is None:
        focal = best_train
    else:
        if not (1 <= focal_model <= len(models)) or models[focal_model - 1] is None:
            raise ModelLookupError(f"unknown model id {focal_model}")
        focal = focal_model

    catalog = unique_genes(pop)
    payload: dict = {
        "schema_version": PAYLOAD_SCHEMA_VERSION,
        "kind": kind,
        "split_names": list(dataset.splits_present),
        "num_inputs": dataset.num_inputs,
        "var_names": list(dataset.var_names),
        "focal_model_id": focal,
        "best_train_id": best_train,
        "models": _model_rows(models, catalog),
        "front_ids": pareto_front_ids(models, "train"),
        "gene_catalog": [
            {
                "id": e.gene_id,
                "genotype": T.to_prefix(e.genotype),
                "simplified": e.infix,
                "complexity": T.expressional_complexity(e.genotype),
                "member_models": sorted(e.member_models),
            }
            for e in catalog.entries
        ],
        "history": [
            run_summary(hist) for hist in pop.histories if hist
        ],
    }

    if kind in ("model", "genes"):
        impact = gene_impact(focal, catalog, pop, dataset)
        per_model = []
        for mid in valid_ids:
            doc = impact if mid == focal else gene_impact(
                mid, catalog, pop, dataset, include_absent=False)
            per_model.append(_impact_doc(doc))
        payload["gene_impact"] = _impact_doc(impact)
        payload["gene_impact_per_model"] = per_model
        payload["crossprod"] = crossprod_block(catalog, dataset, impact,
                                               max_crossprod_genes)
    if kind in ("model", "pareto"):
        ids = rec_model_ids or [focal]
        payload["rec"] = [
            {
                "model_id": mid,
                "split": split,
                "eps": [float(v) for v in curve.eps],
                "proportion": [float(v) for v in curve.proportion],
            }
            for mid in ids
            for split in dataset.splits_present
            for curve in [rec_curve(models[mid - 1], dataset, split, mid)]
        ]
    return payload


# ---------------------------------------------------------------------------
# HTML emission

_HTML_TEMPLATE = """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>mgsr report</title>
<style>
body {{ font-family: system-ui, sans-serif; margin: 1.5rem; color: #1a1a1a; }}
.banner {{ background: #fee; border: 1px solid #c00; padding: 0.5rem; }}
</style>
</head>
<body>
<div id="app"><noscript>This report requires JavaScript.</noscript></div>
<script id="mgsr-payload" type="application/json">{payload}</script>
<script>{bundle}</script>
</body>
</html>
"""

_FALLBACK_BUNDLE = """(function () {
  var el = document.getElementById('mgsr-payload');
  var app = document.getElementById('app');
  var payload = JSON.parse(el.textContent);
  var pre = document.createElement('pre');
  pre.textContent = 'mgsr report (UI bundle not built) — ' +
    payload.models.length + ' models, kind ' + payload.kind;
  app.appendChild(pre);
})();
"""


def ui_bundle() -> str:
    """The embedded report UI; falls back to a payload dump if not built."""
    ref = importlib.resources.files("mgsr").joinpath("report_assets/bundle.js")
    try:
        return ref.read_text()
    except FileNotFoundError:
        return _FALLBACK_BUNDLE


def payload_json(payload: dict) -> str:
    # '</' must not appear inside an inline script block
    return json.dumps(payload, sort_keys=True).replace("</", "<\\/")


def emit_html(payload: dict, bundle: str | None = None) -> str:
    return _HTML_TEMPLATE.format(payload=payload_json(payload),
                                 bundle=bundle if bundle is not None else ui_bundle())


def write_report(path, payload: dict) -> None:
    from pathlib import Path

    Path(path).write_text(emit_html(payload))
