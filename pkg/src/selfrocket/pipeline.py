"""End-to-end estimator: plans, feature generation, selection, final ridge.

Model file layout (all integers little-endian)::

    magic            16 bytes  b"SELFROCKET-MODEL"
    header_length    uint64
    header           UTF-8 JSON, keys sorted
    payload          raw arrays, concatenated in header["arrays"] order
    digest           32 bytes, SHA-256 of everything above

``header["arrays"]`` lists ``name``, ``dtype``, ``shape``, ``offset`` and
``nbytes`` for each array; offsets are relative to the payload start.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import tempfile
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import __version__
from ._errors import (
    ConfigError,
    IncompatibleVersionError,
    IntegrityError,
    SelfRocketError,
    ShapeError,
    StageError,
)
from .combos import ALL_COMBOS, ComboId, Representation
from .data import znormalize, znormalize_rows
from .ridge import DEFAULT_ALPHAS, RidgeModel, accuracy, fit_ridge
from .ridge import predict as ridge_predict
from .selection import PerformanceTable, SelectionConfig, select_features
from .transform import DEFAULT_NUM_FEATURES, TransformPlan, fit_plans, transform

__all__ = ["FittedModel", "OracleResult", "fit", "fit_from_features", "predict",
           "fit_oracle", "save", "load", "MODEL_FORMAT_VERSION"]

MAGIC = b"SELFROCKET-MODEL"
MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class FittedModel:
    plans: dict
    combo: ComboId
    ridge: RidgeModel
    cfg: SelectionConfig
    class_names: tuple
    metadata: dict = field(default_factory=dict)
    table: PerformanceTable | None = None

    def __post_init__(self):
        expected = sum(self.plans[r].num_features for r in self.combo.representation.parts)
        if self.ridge.n_features != expected:
            raise ShapeError(
                f"ridge has {self.ridge.n_features} features, {self.combo.name} implies {expected}"
            )

    @property
    def num_features(self):
        return self.ridge.n_features

    @property
    def input_length(self):
        return self.plans[Representation.BASE].input_length


class OracleResult(NamedTuple):
    """Test-set-selected combination: an upper bound, not a deployable model."""

    combo: ComboId
    accuracies: dict


def _series(ds):
    return np.asarray(getattr(ds, "series", ds), dtype=np.float64)


def _stage(name, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except StageError:
        raise
    except SelfRocketError as exc:
        raise StageError(name, exc) from exc


def fit_from_features(features, labels, plans, cfg, class_names, combo=None,
                      alphas=DEFAULT_ALPHAS, metadata=None, n_jobs=1):
    """Selection and final classifier on precomputed training features.

    ``combo`` bypasses selection when given.
    """
    labels = np.asarray(labels, dtype=np.int64)
    table = None
    if combo is None:
        combo, table = select_features(features, labels, cfg, alphas, n_jobs)
    ridge = _stage("classifier", fit_ridge, features[combo], labels, alphas,
                   n_classes=len(class_names))
    return FittedModel(
        plans={r: plans[r] for r in (Representation.BASE, Representation.DIFF)},
        combo=combo, ridge=ridge, cfg=cfg, class_names=tuple(class_names),
        metadata=dict(metadata or {}), table=table,
    )


def fit(train, cfg=SelectionConfig(), seed=None, combo=None,
        num_features=DEFAULT_NUM_FEATURES, alphas=DEFAULT_ALPHAS, n_jobs=1,
        normalize=False):
    """Fit the classifier on a training set.

    Parameters
    ----------
    train : TimeSeriesDataset
    cfg : SelectionConfig
    seed : int, optional
        Seeds both the kernel plans and the selection; overrides ``cfg.seed``.
    combo : ComboId or str, optional
        Fix the combination and skip selection.
    num_features : int
        Features per plain representation.
    normalize : bool
        Z-normalize each series first; the model repeats this at prediction.

    Returns
    -------
    FittedModel
    """
    if seed is not None:
        cfg = SelectionConfig(**{**cfg.to_dict(), "seed": int(seed)})
    if isinstance(combo, str):
        combo = ComboId.parse(combo)
    if normalize:
        train = znormalize(train)
    plans = _stage("transform", fit_plans, train, num_features, cfg.seed)
    combos = ALL_COMBOS if combo is None else (combo,)
    features = _stage("transform", transform, train, plans, combos)
    metadata = {"dataset": train.name, "seed": cfg.seed, "version": __version__,
                "znormalize": bool(normalize)}
    return fit_from_features(features, train.labels, plans, cfg, train.class_names,
                             combo, alphas, metadata, n_jobs)


def predict(model, ds):
    """Predicted class ids, computing only the selected combination's features."""
    X = _series(ds)
    if X.ndim != 2 or X.shape[1] != model.input_length:
        raise ShapeError(
            f"series length {X.shape[-1]} does not match model length {model.input_length}"
        )
    if model.metadata.get("znormalize"):
        X = znormalize_rows(X)
    features = transform(X, model.plans, (model.combo,))[model.combo]
    return ridge_predict(model.ridge, features)


def fit_oracle(train, test, seed=0, num_features=DEFAULT_NUM_FEATURES,
               alphas=DEFAULT_ALPHAS, plans=None, train_features=None):
    """Score every combination on the test set and keep the best.

    This reads test labels by design and only measures the ceiling of the
    selection step.
    """
    if test.n_instances == 0:
        raise ShapeError("empty test set")
    if plans is None:
        plans = _stage("transform", fit_plans, train, num_features, seed)
    if train_features is None:
        train_features = _stage("transform", transform, train, plans)
    test_features = _stage("transform", transform, test, plans)
    scores = {}
    for combo in ALL_COMBOS:
        ridge = _stage("classifier", fit_ridge, train_features[combo], train.labels, alphas,
                       n_classes=train.n_classes)
        scores[combo] = accuracy(test.labels, ridge_predict(ridge, test_features[combo]))
    best = max(ALL_COMBOS, key=lambda c: (scores[c], -c.index))
    return OracleResult(best, scores)


# -- serialization ----------------------------------------------------------

def _arrays(model):
    out = {}
    for rep, plan in sorted(model.plans.items()):
        out[f"plan.{rep.name}.dilations"] = plan.dilations
        out[f"plan.{rep.name}.features_per_dilation"] = plan.features_per_dilation
        out[f"plan.{rep.name}.biases"] = plan.biases
    out["ridge.weights"] = model.ridge.weights
    out["ridge.intercepts"] = model.ridge.intercepts
    out["ridge.feature_means"] = model.ridge.feature_means
    out["ridge.feature_scales"] = model.ridge.feature_scales
    if model.table is not None:
        out["table.scores"] = model.table.scores
    return out


def to_bytes(model, version=MODEL_FORMAT_VERSION):
    entries = []
    chunks = []
    offset = 0
    for name, arr in _arrays(model).items():
        arr = np.ascontiguousarray(arr)
        le = arr.astype(arr.dtype.newbyteorder("<"), copy=False)
        raw = le.tobytes()
        entries.append({"name": name, "dtype": le.dtype.str, "shape": list(arr.shape),
                        "offset": offset, "nbytes": len(raw)})
        chunks.append(raw)
        offset += len(raw)
    header = {
        "format": "selfrocket-model",
        "format_version": version,
        "combo": model.combo.name,
        "class_names": list(model.class_names),
        "cfg": model.cfg.to_dict(),
        "alpha": model.ridge.alpha,
        "plans": {rep.name: {"input_length": p.input_length, "seed": p.seed}
                  for rep, p in sorted(model.plans.items())},
        "table_combos": None if model.table is None else [c.name for c in model.table.combos],
        "metadata": model.metadata,
        "arrays": entries,
    }
    head = json.dumps(header, sort_keys=True).encode("utf-8")
    body = MAGIC + struct.pack("<Q", len(head)) + head + b"".join(chunks)
    return body + hashlib.sha256(body).digest()


def from_bytes(blob):
    if len(blob) < len(MAGIC) + 8 + 32 or not blob.startswith(MAGIC):
        raise IntegrityError("not a model file or truncated header")
    body, digest = blob[:-32], blob[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise IntegrityError("checksum mismatch: model file is corrupt or truncated")
    (head_len,) = struct.unpack("<Q", body[len(MAGIC):len(MAGIC) + 8])
    start = len(MAGIC) + 8
    try:
        header = json.loads(body[start:start + head_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise IntegrityError(f"unreadable header: {exc}") from None
    version = header.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise IncompatibleVersionError(
            f"model format version {version} is not supported (this library reads "
            f"version {MODEL_FORMAT_VERSION})"
        )
    payload = body[start + head_len:]
    arrays = {}
    for e in header["arrays"]:
        raw = payload[e["offset"]:e["offset"] + e["nbytes"]]
        arrays[e["name"]] = np.frombuffer(raw, dtype=np.dtype(e["dtype"])).reshape(e["shape"]).copy()
    plans = {}
    for name, info in header["plans"].items():
        rep = Representation[name]
        plans[rep] = TransformPlan(
            rep, info["input_length"],
            arrays[f"plan.{name}.dilations"], arrays[f"plan.{name}.features_per_dilation"],
            arrays[f"plan.{name}.biases"], info["seed"],
        )
    ridge = RidgeModel(
        weights=arrays["ridge.weights"], intercepts=arrays["ridge.intercepts"],
        alpha=header["alpha"], feature_means=arrays["ridge.feature_means"],
        feature_scales=arrays["ridge.feature_scales"],
    )
    table = None
    if header["table_combos"] is not None:
        table = PerformanceTable(arrays["table.scores"],
                                 tuple(ComboId.parse(c) for c in header["table_combos"]))
    return FittedModel(
        plans=plans, combo=ComboId.parse(header["combo"]), ridge=ridge,
        cfg=SelectionConfig.from_dict(header["cfg"]), class_names=tuple(header["class_names"]),
        metadata=header["metadata"], table=table,
    )


def save(model, path):
    """Write atomically; a failed write leaves no partial file behind."""
    blob = to_bytes(model)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".selfrocket-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load(path):
    with open(path, "rb") as fh:
        return from_bytes(fh.read())


def check_combo(name):
    try:
        return ComboId.parse(name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
