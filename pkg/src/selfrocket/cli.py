"""Command-line entry point: ``selfrocket {fit,predict,oracle,inspect,splits,benchmark}``.

Exit status: 0 success, 1 pipeline or benchmark failure, 2 usage or
missing input, 3 incompatible or corrupt model/data.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__
from ._errors import (
    ConfigError,
    EmptyInputError,
    FormatError,
    IncompatibleVersionError,
    IntegrityError,
    ParseError,
    SelfRocketError,
    ShapeError,
    StageError,
)
from .benchmark import SELFROCKET, parse_variants, run_benchmark
from .combos import ComboId
from .data import (
    SplitSpec,
    _align_classes,
    _canonical_label,
    _to_matrix,
    load_dataset,
    make_splits,
    parse_rows,
)
from .pipeline import fit, fit_oracle, load, predict, save
from .selection import SelectionConfig

EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DATA = 3


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _add_selection_flags(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=2, help="folds per run (>= 2)")
    p.add_argument("--nr", type=int, default=10, help="runs")
    p.add_argument("--f", type=int, default=2500, help="features per mini-classifier")
    p.add_argument("--mds", type=int, default=500, help="max dataset size for k-fold splits")
    p.add_argument("--top", type=int, default=5)
    p.add_argument("--thresh", type=float, default=0.9)
    p.add_argument("--default-combo", default="PPV_MIX")
    p.add_argument("--num-features", type=int, default=9996,
                   help="features per representation")


def _config(args):
    try:
        return SelectionConfig(k=args.k, nr=args.nr, f=args.f, mds=args.mds, top=args.top,
                               thresh=args.thresh, default_combo=args.default_combo,
                               seed=args.seed)
    except (ConfigError, ValueError) as exc:
        raise CliError(f"invalid configuration: {exc}", EXIT_USAGE) from None


def _jobs(args):
    if args.jobs is not None:
        return args.jobs
    return int(os.environ.get("SELFROCKET_JOBS", "1"))


def _require_file(path):
    if not os.path.isfile(path):
        raise CliError(f"no such file: {path}", EXIT_USAGE)


def _load_model(path):
    _require_file(path)
    try:
        return load(path)
    except (IntegrityError, IncompatibleVersionError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_DATA) from None


def cmd_fit(args):
    _require_file(args.train)
    cfg = _config(args)
    combo = None
    if args.combo:
        try:
            combo = ComboId.parse(args.combo)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_USAGE) from None
    train = load_dataset(args.train)
    t0 = time.perf_counter()
    model = fit(train, cfg, combo=combo, num_features=args.num_features,
                normalize=args.znorm, n_jobs=_jobs(args))
    seconds = time.perf_counter() - t0
    save(model, args.output)
    report = {
        "model": args.output,
        "combo": model.combo.name,
        "num_features": model.num_features,
        "alpha": model.ridge.alpha,
        "config": cfg.to_dict(),
        "selection_table": None,
    }
    if model.table is not None:
        table_path = args.output + ".table.csv"
        model.table.to_csv(table_path)
        report["selection_table"] = table_path
    if not args.no_timings:
        report["fit_seconds"] = seconds
    with open(args.report or args.output + ".report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps({"combo": model.combo.name, "model": args.output}))
    return 0


def _read_prediction_input(path, model):
    """Series and optional label strings; labels present iff there is one extra column."""
    _require_file(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = parse_rows(fh, source=path)
    width = len(rows[0][1])
    length = model.input_length
    if width == length + 1:
        return _to_matrix(rows, 1, path), [_canonical_label(f[0]) for _, f in rows]
    if width == length:
        return _to_matrix(rows, 0, path), None
    raise CliError(
        f"{path}: series length {width - 1} (or {width} unlabeled) does not match "
        f"model length {length}",
        EXIT_DATA,
    )


def cmd_predict(args):
    model = _load_model(args.model)
    X, labels = _read_prediction_input(args.data, model)
    if args.score and labels is None:
        raise CliError(f"{args.data}: --score needs a labeled file", EXIT_USAGE)
    pred = predict(model, X)
    if args.score:
        names = np.array(model.class_names, dtype=object)[pred]
        acc = float(np.mean([a == b for a, b in zip(names, labels)]))
        print(f"accuracy: {acc:.4f}")
    else:
        out = sys.stdout
        for i in pred:
            out.write(f"{model.class_names[i]}\n")
    return 0


def cmd_oracle(args):
    _require_file(args.train)
    _require_file(args.test)
    train = load_dataset(args.train)
    test = load_dataset(args.test)
    test = _align_classes(test, train.class_names)
    result = fit_oracle(train, test, seed=args.seed, num_features=args.num_features)
    print(json.dumps({
        "note": "test-set selected upper bound",
        "combo": result.combo.name,
        "accuracies": {c.name: a for c, a in result.accuracies.items()},
    }, indent=2))
    return 0


def cmd_inspect(args):
    model = _load_model(args.model)
    info = {
        "combo": model.combo.name,
        "num_features": model.num_features,
        "alpha": model.ridge.alpha,
        "classes": list(model.class_names),
        "input_length": model.input_length,
        "dilations": {rep.name: plan.dilations.tolist() for rep, plan in sorted(model.plans.items())},
        "features_per_dilation": {
            rep.name: plan.features_per_dilation.tolist() for rep, plan in sorted(model.plans.items())
        },
        "config": model.cfg.to_dict(),
        "metadata": model.metadata,
    }
    print(json.dumps(info, indent=2, sort_keys=True))
    return 0


def cmd_splits(args):
    """Dump the selection splits of a training file as JSON, for audit."""
    _require_file(args.train)
    train = load_dataset(args.train)
    try:
        spec = SplitSpec(k=args.k, nr=args.nr, mds=args.mds, seed=args.seed)
    except ConfigError as exc:
        raise CliError(f"invalid configuration: {exc}", EXIT_USAGE) from None
    splits = make_splits(train.labels, spec)
    print(json.dumps([{"train": tr.tolist(), "validation": va.tolist()} for tr, va in splits]))
    return 0


def cmd_benchmark(args):
    if not os.path.isdir(args.dataset_dir):
        raise CliError(f"no such directory: {args.dataset_dir}", EXIT_USAGE)
    cfg = _config(args)
    try:
        variants = parse_variants(args.variants)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    datasets = args.datasets
    if datasets.startswith("@"):
        with open(datasets[1:], encoding="utf-8") as fh:
            datasets = ",".join(line.strip() for line in fh if line.strip())
    names = [d.strip() for d in datasets.split(",") if d.strip()]
    failed = run_benchmark(
        args.dataset_dir, names, args.resamples, variants, cfg, args.out_dir,
        jobs=_jobs(args), timings=not args.no_timings, num_features=args.num_features,
    )
    if failed:
        print(f"failed datasets: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAILURE
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="selfrocket", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model on a labeled training file")
    p.add_argument("train")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--combo", help="fix the combination instead of selecting it")
    p.add_argument("--report", help="fit report path (default: <output>.report.json)")
    p.add_argument("--znorm", action="store_true", help="z-normalize series")
    p.add_argument("--jobs", type=int)
    p.add_argument("--no-timings", action="store_true")
    _add_selection_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="predict labels or score a labeled file")
    p.add_argument("model")
    p.add_argument("data")
    p.add_argument("--score", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("oracle", help="test-set selected upper bound (diagnostic only)")
    p.add_argument("train")
    p.add_argument("test")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--num-features", type=int, default=9996)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("inspect", help="print model summary as JSON")
    p.add_argument("model")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("splits", help="print the selection train/validation splits as JSON")
    p.add_argument("train")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--nr", type=int, default=10)
    p.add_argument("--mds", type=int, default=500)
    p.set_defaults(func=cmd_splits)

    p = sub.add_parser("benchmark", help="seeded resample benchmark over UCR datasets")
    p.add_argument("dataset_dir")
    p.add_argument("--datasets", required=True, help="comma-separated names or @file")
    p.add_argument("--resamples", type=int, default=30)
    p.add_argument("--variants", default=SELFROCKET,
                   help="comma-separated: selfrocket, oracle, or combination names")
    p.add_argument("--out-dir", default="benchmark-out")
    p.add_argument("--jobs", type=int)
    p.add_argument("--no-timings", action="store_true")
    _add_selection_flags(p)
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"selfrocket: {exc}", file=sys.stderr)
        return exc.code
    except SelfRocketError as exc:
        print(f"selfrocket: {exc}", file=sys.stderr)
        return _exit_code(exc)


def _exit_code(exc):
    cause = exc.cause if isinstance(exc, StageError) else exc
    if isinstance(cause, ConfigError):
        return EXIT_USAGE
    if isinstance(cause, (ShapeError, FormatError, ParseError, EmptyInputError,
                          IntegrityError, IncompatibleVersionError)):
        return EXIT_DATA
    return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
