"""Command-line interface: run, report, filter, export, rec, merge, genes.

Runs are driven by an INI-style config file with four sections (engine,
dataset, palette, output); unknown keys are rejected so typos surface
immediately. Analysis commands operate on population archives and reload
the dataset from the paths recorded at run time (override with --data),
verifying the dataset fingerprint.

Every error path exits nonzero after printing a single machine-parsable
line to stderr: ``mgsr-error: code=<code> message=<human text>``.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import archive as arch
from .analyze import (
    FilterCriteria,
    apply_filter,
    evaluate_population_models,
    model_from_genes,
    rec_curve,
    resolve_model_id,
    unique_genes,
)
from .dataset import Dataset, load_csv
from .errors import ConfigurationError, DataError, MgsrError, ModelLookupError
from .evolve import RunConfig, merge_populations, multi_run
from .export import EXPORT_FORMATS, export_model, model_equation
from .functions import DEFAULT_FUNCTIONS, make_palette
from .report import DEFAULT_MAX_CROSSPROD_GENES, REPORT_KINDS, build_payload, write_report

DEFAULT_ARCHIVE_NAME = "population.json"


# ---------------------------------------------------------------------------
# config file

_ENGINE_KEYS = {
    "population_size": int,
    "max_generations": int,
    "max_run_seconds": float,
    "target_fitness": float,
    "g_max": int,
    "max_depth": int,
    "tournament_size": int,
    "tournament_regular": float,
    "tournament_pareto": float,
    "tournament_lexicographic": float,
    "crossover_prob": float,
    "high_level_fraction": float,
    "cr": float,
    "mutation_prob": float,
    "mutation_operator_weights": str,
    "elitism": int,
    "complexity_measure": str,
    "num_runs": int,
    "seed": int,
}

_DATASET_KEYS = {
    "train": str,
    "validation": str,
    "test": str,
    "response": str,
    "split_column": str,
    "train_fraction": float,
    "val_fraction": float,
    "test_fraction": float,
    "split_seed": int,
}

_PALETTE_KEYS = {"functions": str, "erc": bool, "erc_lo": float, "erc_hi": float}

_OUTPUT_KEYS = {"dir": str, "archive": str}


def read_config(path) -> dict:
    """Parse and validate a run config file into plain dicts."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    found = parser.read(path)
    if not found:
        raise ConfigurationError(f"config file not found: {path}")

    known = {
        "engine": _ENGINE_KEYS,
        "dataset": _DATASET_KEYS,
        "palette": _PALETTE_KEYS,
        "output": _OUTPUT_KEYS,
    }
    doc: dict = {section: {} for section in known}
    for section in parser.sections():
        if section not in known:
            raise ConfigurationError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in known[section]:
                raise ConfigurationError(f"unknown key {key!r} in section [{section}]")
            caster = known[section][key]
            try:
                if caster is bool:
                    doc[section][key] = parser.getboolean(section, key)
                else:
                    doc[section][key] = caster(raw)
            except ValueError as exc:
                raise ConfigurationError(
                    f"bad value for {key!r} in [{section}]: {raw!r}"
                ) from exc
    if "response" not in doc["dataset"]:
        raise ConfigurationError("config must name the response column ([dataset] response)")
    if "train" not in doc["dataset"]:
        raise ConfigurationError("config must give a training CSV path ([dataset] train)")
    return doc


def run_config_from_doc(doc: dict, seed_override: int | None = None) -> RunConfig:
    e = doc["engine"]
    mix = (
        e.get("tournament_regular", 0.5),
        e.get("tournament_pareto", 0.5),
        e.get("tournament_lexicographic", 0.0),
    )
    weights_raw = e.get("mutation_operator_weights")
    if weights_raw is not None:
        weights = tuple(float(w) for w in weights_raw.split(","))
    else:
        weights = RunConfig.__dataclass_fields__["mutation_operator_weights"].default
    defaults = RunConfig()
    return RunConfig(
        population_size=e.get("population_size", defaults.population_size),
        max_generations=e.get("max_generations", defaults.max_generations),
        max_run_seconds=e.get("max_run_seconds", defaults.max_run_seconds),
        target_fitness=e.get("target_fitness", defaults.target_fitness),
        g_max=e.get("g_max", defaults.g_max),
        max_depth=e.get("max_depth", defaults.max_depth),
        tournament_size=e.get("tournament_size", defaults.tournament_size),
        tournament_mix=mix,
        crossover_prob=e.get("crossover_prob", defaults.crossover_prob),
        high_level_fraction=e.get("high_level_fraction", defaults.high_level_fraction),
        cr=e.get("cr", defaults.cr),
        mutation_prob=e.get("mutation_prob", defaults.mutation_prob),
        mutation_operator_weights=weights,
        elitism=e.get("elitism", defaults.elitism),
        complexity_measure=e.get("complexity_measure", defaults.complexity_measure),
        num_runs=e.get("num_runs", defaults.num_runs),
        seed=seed_override if seed_override is not None else e.get("seed", defaults.seed),
    )


def dataset_info_from_doc(doc: dict, config_dir: Path) -> dict:
    d = doc["dataset"]

    def resolved(key):
        if key not in d:
            return None
        p = Path(d[key])
        return str(p if p.is_absolute() else (config_dir / p))

    return {
        "train": resolved("train"),
        "validation": resolved("validation"),
        "test": resolved("test"),
        "response": d["response"],
        "split_column": d.get("split_column", "split"),
        "fractions": [
            d.get("train_fraction", 0.70),
            d.get("val_fraction", 0.15),
            d.get("test_fraction", 0.15),
        ],
        "split_seed": d.get("split_seed", 0),
    }


def load_dataset(info: dict, data_override: str | None = None) -> Dataset:
    extra = {}
    if info.get("validation"):
        extra["val"] = info["validation"]
    if info.get("test"):
        extra["test"] = info["test"]
    return load_csv(
        data_override or info["train"],
        response=info["response"],
        split_column=info.get("split_column") or "split",
        fractions=tuple(info.get("fractions", (0.70, 0.15, 0.15))),
        seed=info.get("split_seed", 0),
        extra_paths=extra or None,
    )


def palette_from_doc(doc: dict, num_inputs: int):
    p = doc["palette"]
    names = tuple(
        n.strip() for n in p.get("functions", ",".join(DEFAULT_FUNCTIONS)).split(",") if n.strip()
    )
    return make_palette(
        names,
        num_inputs=num_inputs,
        erc_enabled=p.get("erc", True),
        erc_range=(p.get("erc_lo", -10.0), p.get("erc_hi", 10.0)),
    )


# ---------------------------------------------------------------------------
# shared helpers

def default_threads() -> int:
    raw = os.environ.get("MGSR_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _load_archive_and_data(args):
    pop, cfg, palette, info = arch.read_archive(args.archive)
    dataset = load_dataset(info, getattr(args, "data", None))
    arch.verify_fingerprint(dataset, info)
    return pop, cfg, palette, info, dataset


def _parse_id_list(raw: str) -> list[int]:
    try:
        return [int(tok) for tok in raw.replace(",", " ").split()]
    except ValueError as exc:
        raise ModelLookupError(f"bad id list {raw!r}") from exc


# ---------------------------------------------------------------------------
# subcommands

def cmd_run(args) -> int:
    doc = read_config(args.config)
    cfg = run_config_from_doc(doc, args.seed)
    config_dir = Path(args.config).resolve().parent
    info = dataset_info_from_doc(doc, config_dir)
    dataset = load_dataset(info)
    info["fingerprint"] = dataset.fingerprint()
    palette = palette_from_doc(doc, dataset.num_inputs)

    if args.out:
        out_dir = Path(args.out)
    else:
        configured = Path(doc["output"].get("dir", "."))
        out_dir = configured if configured.is_absolute() else config_dir / configured
    out_dir.mkdir(parents=True, exist_ok=True)
    archive_path = out_dir / doc["output"].get("archive", DEFAULT_ARCHIVE_NAME)

    pop = multi_run(cfg, dataset, palette, args.threads)
    arch.write_archive(archive_path, pop, cfg, palette, info)

    models = evaluate_population_models(pop, dataset)
    best_id = resolve_model_id("best", models)
    best = models[best_id - 1]
    print(f"runs: {cfg.num_runs}  population: {len(pop.individuals)}  "
          f"generations per run: {[len(h) - 1 for h in pop.histories]}")
    print(f"best model: id={best_id} rmse={best.rmse_train:.6g} "
          f"r2={best.r2_train:.6g} complexity={best.complexity}")
    for split in dataset.splits_present:
        s = best.stats[split]
        print(f"  {split}: rmse={s.rmse:.6g} r2={s.r2:.6g}")
    print(f"equation: {model_equation(best)}")
    print(f"archive written to {archive_path}")
    return 0


def cmd_report(args) -> int:
    pop, cfg, _palette, _info, dataset = _load_archive_and_data(args)
    focal = int(args.model) if args.model else None
    payload = build_payload(pop, dataset, kind=args.kind, focal_model=focal,
                            max_crossprod_genes=args.max_catalog)
    out = Path(args.out or f"report_{args.kind}.html")
    write_report(out, payload)
    print(f"report written to {out}")
    return 0


def cmd_filter(args) -> int:
    pop, cfg, palette, info, dataset = _load_archive_and_data(args)
    criteria = FilterCriteria(
        min_r2_train=args.min_r2_train,
        include_vars=frozenset(_parse_id_list(args.include_vars) if args.include_vars else []),
        exclude_vars=frozenset(_parse_id_list(args.exclude_vars) if args.exclude_vars else []),
        max_complexity=args.max_complexity,
        min_num_vars=args.min_num_vars,
        max_num_vars=args.max_num_vars,
        pareto_only=args.pareto_only,
    )
    filtered = apply_filter(pop, criteria, dataset)
    if not filtered.individuals:
        print("warning: filter matched no models; writing an empty archive", file=sys.stderr)
    arch.write_archive(args.out, filtered, cfg, palette, info)
    print(f"kept {len(filtered.individuals)} of {len(pop.individuals)} models -> {args.out}")
    return 0


def cmd_export(args) -> int:
    pop, cfg, palette, info, dataset = _load_archive_and_data(args)
    models = evaluate_population_models(pop, dataset)
    model_id = resolve_model_id(args.model, models)
    text = export_model(models[model_id - 1], args.format, arch.palette_manifest(palette))
    if args.out:
        Path(args.out).write_text(text)
        print(f"model {model_id} exported to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_rec(args) -> int:
    pop, cfg, _palette, _info, dataset = _load_archive_and_data(args)
    models = evaluate_population_models(pop, dataset)
    ids = _parse_id_list(args.models) if args.models else []
    for mid in ids:
        if not 1 <= mid <= len(models) or models[mid - 1] is None:
            raise ModelLookupError(f"unknown model id {mid}")
    if args.include_best:
        best = resolve_model_id("best", models)
        if best not in ids:
            ids.append(best)
    if not ids:
        raise ModelLookupError("no models selected; pass --models or --include-best")
    curves = [
        {
            "model_id": mid,
            "split": args.split,
            "eps": [float(v) for v in curve.eps],
            "proportion": [float(v) for v in curve.proportion],
        }
        for mid in ids
        for curve in [rec_curve(models[mid - 1], dataset, args.split, mid)]
    ]
    out = Path(args.out or "rec.json")
    out.write_text(json.dumps({"split": args.split, "curves": curves}, indent=2,
                              sort_keys=True) + "\n")
    print(f"{len(curves)} REC curves written to {out}")
    if args.html:
        payload = build_payload(pop, dataset, kind="pareto", rec_model_ids=ids)
        write_report(args.html, payload)
        print(f"report written to {args.html}")
    return 0


def cmd_merge(args) -> int:
    loaded = [arch.read_archive(p) for p in args.archives]
    merged = merge_populations([pop for pop, *_ in loaded])
    _pop, cfg, palette, info = loaded[0]
    cfg = replace(cfg, num_runs=sum(l[1].num_runs for l in loaded))
    arch.write_archive(args.out, merged, cfg, palette, info)
    print(f"merged {len(loaded)} archives ({len(merged.individuals)} models) -> {args.out}")
    return 0


def cmd_genes(args) -> int:
    pop, cfg, palette, info, dataset = _load_archive_and_data(args)
    if args.from_selection:
        try:
            raw = Path(args.from_selection).read_text()
        except FileNotFoundError as exc:
            raise DataError(f"selection file not found: {args.from_selection}") from exc
        ids = [int(line) for line in raw.split() if line.strip()]
    elif args.ids:
        ids = _parse_id_list(args.ids)
    else:
        raise ModelLookupError("pass --ids or --from-selection")
    catalog = unique_genes(pop)
    model = model_from_genes(ids, catalog, dataset, g_max=cfg.g_max,
                             complexity_measure=cfg.complexity_measure)
    print(f"genes: {ids}")
    for split in dataset.splits_present:
        s = model.stats[split]
        print(f"  {split}: rmse={s.rmse:.6g} r2={s.r2:.6g}")
    print(f"equation: {model_equation(model)}")
    if args.out:
        Path(args.out).write_text(
            export_model(model, args.format, arch.palette_manifest(palette))
        )
        print(f"model exported to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mgsr",
        description="Multigene symbolic regression: evolve, analyze and export models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a configured set of runs")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--threads", type=int, default=default_threads())
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.set_defaults(func=cmd_run)

    p_rep = sub.add_parser("report", help="emit a standalone HTML report")
    p_rep.add_argument("archive")
    p_rep.add_argument("--kind", choices=REPORT_KINDS, default="pareto")
    p_rep.add_argument("--model", default=None, help="focal model id (model/genes kinds)")
    p_rep.add_argument("--max-catalog", type=int, default=DEFAULT_MAX_CROSSPROD_GENES)
    p_rep.add_argument("--data", default=None, help="override the recorded dataset path")
    p_rep.add_argument("--out", default=None)
    p_rep.set_defaults(func=cmd_report)

    p_fil = sub.add_parser("filter", help="write a filtered copy of an archive")
    p_fil.add_argument("archive")
    p_fil.add_argument("--min-r2-train", type=float, default=None)
    p_fil.add_argument("--include-vars", default=None, help="e.g. 1,2")
    p_fil.add_argument("--exclude-vars", default=None)
    p_fil.add_argument("--max-complexity", type=int, default=None)
    p_fil.add_argument("--min-num-vars", type=int, default=None)
    p_fil.add_argument("--max-num-vars", type=int, default=None)
    p_fil.add_argument("--pareto-only", action="store_true")
    p_fil.add_argument("--data", default=None)
    p_fil.add_argument("--out", required=True)
    p_fil.set_defaults(func=cmd_filter)

    p_exp = sub.add_parser("export", help="export one model")
    p_exp.add_argument("archive")
    p_exp.add_argument("model", help="model id or keyword best|testbest")
    p_exp.add_argument("--format", choices=EXPORT_FORMATS, default="infix")
    p_exp.add_argument("--data", default=None)
    p_exp.add_argument("--out", default=None)
    p_exp.set_defaults(func=cmd_export)

    p_rec = sub.add_parser("rec", help="regression error characteristic curves")
    p_rec.add_argument("archive")
    p_rec.add_argument("--models", default=None, help="e.g. 2,3,9")
    p_rec.add_argument("--include-best", action="store_true")
    p_rec.add_argument("--split", choices=("train", "val", "test"), default="train")
    p_rec.add_argument("--data", default=None)
    p_rec.add_argument("--out", default=None)
    p_rec.add_argument("--html", default=None, help="also emit an HTML report")
    p_rec.set_defaults(func=cmd_rec)

    p_mrg = sub.add_parser("merge", help="merge archives from runs on the same data")
    p_mrg.add_argument("archives", nargs="+")
    p_mrg.add_argument("--out", required=True)
    p_mrg.set_defaults(func=cmd_merge)

    p_gen = sub.add_parser("genes", help="build a model from catalog gene ids")
    p_gen.add_argument("archive")
    p_gen.add_argument("--ids", default=None, help="e.g. 3,7")
    p_gen.add_argument("--from-selection", default=None,
                       help="text file with one gene id per line (UI export)")
    p_gen.add_argument("--format", choices=EXPORT_FORMATS, default="json")
    p_gen.add_argument("--data", default=None)
    p_gen.add_argument("--out", default=None)
    p_gen.set_defaults(func=cmd_genes)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MgsrError as exc:
        print(f"mgsr-error: code={exc.code} message={exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
