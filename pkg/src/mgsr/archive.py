"""Versioned JSON population archives.

Archives hold the evolved population (genes in prefix form plus cached
fitness/complexity), the run configuration, per-run histories and a
dataset fingerprint — not the data itself. Serialization is deterministic:
sorted keys, fixed indentation, no timestamps, non-finite floats mapped to
null, so identical populations produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict
from pathlib import Path

from .dataset import Dataset
from .errors import ArchiveError
from .evolve import GenStats, Individual, Population, PopulationMeta, RunConfig
from .functions import Palette, make_palette
from . import tree as T

ARCHIVE_VERSION = 1


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _stats_to_dict(h: GenStats) -> dict:
    return {
        "generation": h.generation,
        "best_rmse": _num(h.best_rmse),
        "mean_rmse": _num(h.mean_rmse),
        "best_r2": _num(h.best_r2),
        "invalid_count": h.invalid_count,
    }


def _stats_from_dict(d: dict) -> GenStats:
    inf = float("inf")
    return GenStats(
        generation=d["generation"],
        best_rmse=d["best_rmse"] if d["best_rmse"] is not None else inf,
        mean_rmse=d["mean_rmse"] if d["mean_rmse"] is not None else inf,
        best_r2=d["best_r2"] if d["best_r2"] is not None else -inf,
        invalid_count=d["invalid_count"],
    )


def palette_manifest(palette: Palette) -> dict:
    return {
        "functions": list(f.name for f in palette.functions),
        "num_inputs": palette.num_inputs,
        "erc_enabled": palette.erc_enabled,
        "erc_range": list(palette.erc_range),
    }


def palette_from_manifest(doc: dict) -> Palette:
    return make_palette(
        doc["functions"], doc["num_inputs"], doc["erc_enabled"], tuple(doc["erc_range"])
    )


def archive_document(pop: Population, cfg: RunConfig, palette: Palette,
                     dataset_info: dict) -> dict:
    cfg_doc = asdict(cfg)
    cfg_doc["max_run_seconds"] = _num(cfg.max_run_seconds)
    return {
        "schema_version": ARCHIVE_VERSION,
        "kind": "mgsr-population-archive",
        "config": cfg_doc,
        "palette": palette_manifest(palette),
        "dataset": dataset_info,
        "individuals": [
            {
                "genes": [T.to_prefix(g) for g in ind.genes],
                "fitness": _num(ind.fitness),
                "complexity": ind.complexity,
            }
            for ind in pop.individuals
        ],
        "histories": [[_stats_to_dict(h) for h in hist] for hist in pop.histories],
        "generation": pop.generation,
    }


def dumps_archive(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_archive(path, pop: Population, cfg: RunConfig, palette: Palette,
                  dataset_info: dict) -> None:
    Path(path).write_text(dumps_archive(archive_document(pop, cfg, palette, dataset_info)))


def read_archive(path):
    """Load an archive: returns (population, config, palette, dataset_info)."""
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ArchiveError(f"archive not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ArchiveError(f"archive is not valid JSON: {exc}") from exc
    if doc.get("kind") != "mgsr-population-archive":
        raise ArchiveError("not a population archive")
    if doc.get("schema_version") != ARCHIVE_VERSION:
        raise ArchiveError(f"unsupported archive version {doc.get('schema_version')!r}")

    cfg_doc = dict(doc["config"])
    cfg_doc["tournament_mix"] = tuple(cfg_doc["tournament_mix"])
    cfg_doc["mutation_operator_weights"] = tuple(cfg_doc["mutation_operator_weights"])
    if cfg_doc["max_run_seconds"] is None:
        cfg_doc["max_run_seconds"] = float("inf")
    try:
        cfg = RunConfig(**cfg_doc)
    except TypeError as exc:
        raise ArchiveError(f"archive config does not match this version: {exc}") from exc

    palette = palette_from_manifest(doc["palette"])
    inf = float("inf")
    individuals = [
        Individual(
            genes=tuple(T.from_prefix(g) for g in ind["genes"]),
            fitness=ind["fitness"] if ind["fitness"] is not None else inf,
            complexity=ind["complexity"],
        )
        for ind in doc["individuals"]
    ]
    meta = PopulationMeta(
        dataset_fingerprint=doc["dataset"].get("fingerprint", ""),
        num_inputs=palette.num_inputs,
        complexity_measure=cfg.complexity_measure,
        function_names=tuple(doc["palette"]["functions"]),
    )
    histories = [[_stats_from_dict(h) for h in hist] for hist in doc["histories"]]
    pop = Population(individuals, doc["generation"], histories, {}, meta)
    return pop, cfg, palette, doc["dataset"]


def verify_fingerprint(dataset: Dataset, dataset_info: dict) -> None:
    expected = dataset_info.get("fingerprint")
    if expected and dataset.fingerprint() != expected:
        raise ArchiveError(
            "dataset does not match the archive fingerprint; "
            "pass the data the archive was built from"
        )
