"""Seeded benchmark over (dataset, resample) jobs with CSV reports.

Files written to the output directory:

``results.csv``
    One row per (dataset, resample, variant).
``summary.csv``
    Mean accuracy per dataset and variant.
``combos.csv``
    Counts of selected combinations for the ``selfrocket`` variant: the raw
    vote, the raw vote restricted to high-consensus runs, and the final
    (validated) choice.
``wdl.csv``
    Pairwise win/draw/loss over per-dataset mean accuracies (two or more
    variants only).
``tables/<dataset>_r<resample>.csv``
    Selection performance tables.

Summary files are pure functions of ``results.csv`` (see :func:`summarize`).
"""

from __future__ import annotations

import csv
import itertools
import logging
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .combos import ALL_COMBOS, ComboId
from .data import _stream_seed, load_dataset, stratified_resample
from .pipeline import fit_from_features, fit_oracle, predict
from .ridge import accuracy
from .selection import SelectionConfig, highest_median_vote, vote_consensus
from .transform import DEFAULT_NUM_FEATURES, fit_plans, transform

__all__ = ["BenchmarkResult", "run_benchmark", "run_job", "summarize", "write_summary",
           "read_results", "find_dataset", "parse_variants"]

log = logging.getLogger(__name__)

SELFROCKET = "selfrocket"
ORACLE = "oracle"
RESULT_FIELDS = (
    ["dataset", "resample", "variant", "combo", "accuracy", "fit_seconds",
     "predict_seconds", "vote_combo", "consensus"]
    + [f"median_{c.name}" for c in ALL_COMBOS]
)


@dataclass
class BenchmarkResult:
    dataset: str
    resample: int
    variant: str
    combo: str
    accuracy: float
    fit_seconds: float | None = None
    predict_seconds: float | None = None
    vote_combo: str = ""
    consensus: float | None = None
    medians: dict | None = None

    def row(self):
        def num(v):
            return "" if v is None else repr(float(v))

        out = {
            "dataset": self.dataset, "resample": str(self.resample), "variant": self.variant,
            "combo": self.combo, "accuracy": num(self.accuracy),
            "fit_seconds": num(self.fit_seconds), "predict_seconds": num(self.predict_seconds),
            "vote_combo": self.vote_combo, "consensus": num(self.consensus),
        }
        for c in ALL_COMBOS:
            value = None if not self.medians else self.medians.get(c.name)
            out[f"median_{c.name}"] = num(value)
        return out


def parse_variants(text):
    variants = [v.strip() for v in text.split(",") if v.strip()]
    out = []
    for v in variants:
        low = v.lower()
        if low in (SELFROCKET, ORACLE):
            out.append(low)
        else:
            out.append(ComboId.parse(v).name)
    if not out:
        raise ValueError("no variants given")
    return list(dict.fromkeys(out))


def find_dataset(directory, name):
    """Locate ``<name>_TRAIN`` / ``<name>_TEST`` files, flat or in ``<name>/``."""
    directory = Path(directory)
    for base in (directory, directory / name):
        for ext in (".tsv", ".txt", ".csv", ""):
            train = base / f"{name}_TRAIN{ext}"
            test = base / f"{name}_TEST{ext}"
            if train.is_file() and test.is_file():
                return train, test
    raise FileNotFoundError(f"no such file: {directory}/{name}_TRAIN(.tsv|.txt|.csv)")


def run_job(train, test, resample, variants, cfg, num_features=DEFAULT_NUM_FEATURES, timings=True):
    """Fit and score every variant on one resample.

    All variants share the kernel plans and training features of the
    resample, so fixed-combination variants differ from ``selfrocket`` only
    by the bypassed selection.

    Returns
    -------
    list of BenchmarkResult, table or None
    """
    tr, te = stratified_resample(train, test, resample, cfg.seed)
    seed = int(_stream_seed(cfg.seed, train.name, resample).generate_state(1, np.uint64)[0])
    job_cfg = SelectionConfig(**{**cfg.to_dict(), "seed": seed})
    clock = time.perf_counter
    t0 = clock()
    plans = fit_plans(tr, num_features, seed)
    needs_all = SELFROCKET in variants or ORACLE in variants
    combos = ALL_COMBOS if needs_all else tuple(ComboId.parse(v) for v in variants)
    features = transform(tr, plans, combos)
    shared = clock() - t0
    results = []
    table = None
    for variant in variants:
        t1 = clock()
        if variant == ORACLE:
            oracle = fit_oracle(tr, te, plans=plans, train_features=features)
            elapsed = clock() - t1
            results.append(BenchmarkResult(
                train.name, resample, variant, oracle.combo.name, oracle.accuracies[oracle.combo],
                shared + elapsed if timings else None, None,
            ))
            continue
        combo = None if variant == SELFROCKET else ComboId.parse(variant)
        model = fit_from_features(features, tr.labels, plans, job_cfg, tr.class_names, combo)
        t2 = clock()
        acc = accuracy(te.labels, predict(model, te))
        t3 = clock()
        result = BenchmarkResult(
            train.name, resample, variant, model.combo.name, acc,
            shared + t2 - t1 if timings else None, t3 - t2 if timings else None,
        )
        if model.table is not None:
            table = model.table
            vote = highest_median_vote(table)
            result.vote_combo = vote.name
            result.consensus = vote_consensus(table, vote, job_cfg.top)
            result.medians = {c.name: m for c, m in table.medians().items()}
        results.append(result)
    return results, table


def _job(args):
    name, train, test, resample, variants, cfg, num_features, timings = args
    try:
        results, table = run_job(train, test, resample, variants, cfg, num_features, timings)
        return name, resample, results, table, None
    except Exception as exc:  # reported per dataset by the caller
        return name, resample, None, None, f"{type(exc).__name__}: {exc}"


def run_benchmark(dataset_dir, datasets, n_resamples, variants=(SELFROCKET,),
                  cfg=SelectionConfig(), out_dir="benchmark-out", jobs=1,
                  timings=True, num_features=DEFAULT_NUM_FEATURES):
    """Run every (dataset, resample) job and write the reports.

    Returns
    -------
    list of str
        Names of datasets that failed.
    """
    out_dir = Path(out_dir)
    (out_dir / "tables").mkdir(parents=True, exist_ok=True)
    failed = []
    tasks = []
    for name in datasets:
        try:
            train_path, test_path = find_dataset(dataset_dir, name)
            train = load_dataset(train_path, name=name)
            test = load_dataset(test_path, name=name)
        except Exception as exc:
            log.error("%s: %s", name, exc)
            failed.append(name)
            continue
        for r in range(n_resamples):
            tasks.append((name, train, test, r, list(variants), cfg, num_features, timings))

    if jobs > 1:
        # fork would copy numba/BLAS thread locks mid-use and can hang the workers
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
            outcomes = list(pool.map(_job, tasks))
    else:
        outcomes = [_job(t) for t in tasks]

    rows = []
    for name, resample, results, table, error in outcomes:
        if error is not None:
            log.error("%s resample %d: %s", name, resample, error)
            if name not in failed:
                failed.append(name)
            continue
        if name in failed:
            continue
        rows.extend(r.row() for r in results)
        if table is not None:
            table.to_csv(out_dir / "tables" / f"{name}_r{resample}.csv")
        log.info("%s resample %d: %s", name, resample,
                 ", ".join(f"{r.variant}={r.accuracy:.4f}" for r in results))
    rows = [r for r in rows if r["dataset"] not in failed]
    _write_csv(out_dir / "results.csv", RESULT_FIELDS, rows)
    write_summary(rows, list(variants), cfg.thresh, out_dir)
    return failed


def _write_csv(path, fields, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def read_results(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def summarize(rows, variants, thresh):
    """Summary tables from result rows (as written to or read from CSV).

    Returns
    -------
    dict
        ``file name -> (fields, rows)``.
    """
    datasets = list(dict.fromkeys(r["dataset"] for r in rows))
    acc = {}
    for r in rows:
        acc.setdefault((r["dataset"], r["variant"]), []).append(float(r["accuracy"]))
    means = {key: float(np.mean(v)) for key, v in acc.items()}

    summary_fields = ["dataset", "n_resamples"] + [f"mean_{v}" for v in variants]
    summary = []
    for d in datasets:
        row = {"dataset": d,
               "n_resamples": str(max(len(acc.get((d, v), [])) for v in variants))}
        for v in variants:
            row[f"mean_{v}"] = repr(means[(d, v)]) if (d, v) in means else ""
        summary.append(row)

    counts = {c.name: [0, 0, 0] for c in ALL_COMBOS}
    for r in rows:
        if r["variant"] != SELFROCKET:
            continue
        counts[r["vote_combo"]][0] += 1
        if float(r["consensus"]) >= thresh:
            counts[r["vote_combo"]][1] += 1
        counts[r["combo"]][2] += 1
    combo_fields = ["combo", "raw_vote", "high_consensus", "post_validation"]
    combo_rows = [
        {"combo": name, "raw_vote": str(a), "high_consensus": str(b), "post_validation": str(c)}
        for name, (a, b, c) in counts.items()
    ]

    out = {"summary.csv": (summary_fields, summary), "combos.csv": (combo_fields, combo_rows)}
    if len(variants) >= 2:
        wdl = []
        for a, b in itertools.permutations(variants, 2):
            win = draw = loss = 0
            for d in datasets:
                if (d, a) not in means or (d, b) not in means:
                    continue
                if means[(d, a)] > means[(d, b)]:
                    win += 1
                elif means[(d, a)] == means[(d, b)]:
                    draw += 1
                else:
                    loss += 1
            wdl.append({"variant": a, "versus": b, "win": str(win), "draw": str(draw),
                        "loss": str(loss)})
        out["wdl.csv"] = (["variant", "versus", "win", "draw", "loss"], wdl)
    return out


def write_summary(rows, variants, thresh, out_dir):
    for name, (fields, table) in summarize(rows, variants, thresh).items():
        _write_csv(Path(out_dir) / name, fields, table)
