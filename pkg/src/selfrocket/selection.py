"""Wrapper selection of the (representation set, pooling operator) combination.

Every train/validation split is a voter. Each voter trains one ridge
mini-classifier per combination on a random subset of that combination's
columns and records its validation accuracy. The combination with the
highest median accuracy wins the vote, and the vote is kept only when
enough voters rank it among their best ``top`` combinations.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._errors import ConfigError, SelfRocketError, ShapeError, StageError
from .combos import ALL_COMBOS, PPV_MIX, ComboId
from .data import SplitSpec, _stream_seed, make_splits
from .ridge import DEFAULT_ALPHAS, accuracy, fit_ridge, predict

__all__ = [
    "SelectionConfig",
    "PerformanceTable",
    "evaluate_combos",
    "highest_median_vote",
    "vote_consensus",
    "validate_vote",
    "select_features",
]


@dataclass(frozen=True)
class SelectionConfig:
    k: int = 2
    nr: int = 10
    f: int = 2_500
    mds: int = 500
    top: int = 5
    thresh: float = 0.9
    default_combo: ComboId = PPV_MIX
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.default_combo, str):
            object.__setattr__(self, "default_combo", ComboId.parse(self.default_combo))
        if self.k < 2:
            raise ConfigError(f"k must be >= 2, got {self.k}")
        if self.nr < 1:
            raise ConfigError(f"nr must be >= 1, got {self.nr}")
        if self.f < 1:
            raise ConfigError(f"f must be >= 1, got {self.f}")
        # thresh = 0 is accepted and means "always keep the vote"
        if not 0 <= self.thresh <= 1:
            raise ConfigError(f"thresh must be in [0, 1], got {self.thresh}")
        if not 1 <= self.top <= len(ALL_COMBOS):
            raise ConfigError(f"top must be in [1, {len(ALL_COMBOS)}], got {self.top}")
        if self.mds < 2 * self.k:
            raise ConfigError(f"mds must be >= 2*k = {2 * self.k}, got {self.mds}")

    @property
    def split_spec(self):
        return SplitSpec(k=self.k, nr=self.nr, mds=self.mds, seed=self.seed)

    def to_dict(self):
        return {
            "k": self.k, "nr": self.nr, "f": self.f, "mds": self.mds, "top": self.top,
            "thresh": self.thresh, "default_combo": self.default_combo.name, "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass(frozen=True)
class PerformanceTable:
    """Validation accuracies, one row per voter and one column per combination."""

    scores: np.ndarray
    combos: tuple

    def __post_init__(self):
        scores = np.array(self.scores, dtype=np.float64)
        if scores.ndim != 2 or scores.shape[1] != len(self.combos) or scores.size == 0:
            raise ShapeError(f"score matrix {scores.shape} does not fit {len(self.combos)} combos")
        scores.flags.writeable = False
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "combos", tuple(self.combos))

    @property
    def n_voters(self):
        return self.scores.shape[0]

    def column(self, combo):
        return self.scores[:, self.combos.index(combo)]

    def medians(self):
        return dict(zip(self.combos, np.median(self.scores, axis=0)))

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["voter"] + [c.name for c in self.combos])
            for i, row in enumerate(self.scores):
                writer.writerow([i] + [repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        combos = tuple(ComboId.parse(name) for name in rows[0][1:])
        return cls(np.array([[float(v) for v in r[1:]] for r in rows[1:]]), combos)


def _voter_cell(features, labels, splits, cfg, voter, combo, alphas):
    X = features[combo]
    train_idx, val_idx = splits[voter]
    F = X.shape[1]
    if cfg.f >= F:
        cols = None
    else:
        rng = np.random.default_rng(_stream_seed(cfg.seed, "voter", voter, combo.index))
        cols = np.sort(rng.choice(F, size=cfg.f, replace=False))
    X_train = X[train_idx] if cols is None else X[np.ix_(train_idx, cols)]
    X_val = X[val_idx] if cols is None else X[np.ix_(val_idx, cols)]
    n_classes = int(labels.max()) + 1
    try:
        model = fit_ridge(X_train, labels[train_idx], alphas, n_classes=n_classes)
        return accuracy(labels[val_idx], predict(model, X_val))
    except SelfRocketError as exc:
        raise type(exc)(f"voter {voter}, combo {combo.name}: {exc}") from exc


def evaluate_combos(features, labels, cfg=SelectionConfig(), alphas=DEFAULT_ALPHAS, n_jobs=1):
    """Score every (voter, combination) mini-classifier.

    Parameters
    ----------
    features : dict
        ``ComboId -> ndarray (n, F)`` for the combinations to compare.
    labels : array of shape (n,)
    cfg : SelectionConfig
    n_jobs : int
        Threads used for the independent cells.

    Returns
    -------
    PerformanceTable
    """
    labels = np.asarray(labels, dtype=np.int64)
    combos = tuple(c for c in ALL_COMBOS if c in features)
    if not combos:
        raise ShapeError("no feature matrices given")
    for c in combos:
        if features[c].shape[0] != len(labels):
            raise ShapeError(f"{c.name} has {features[c].shape[0]} rows for {len(labels)} labels")
    splits = make_splits(labels, cfg.split_spec)
    cells = [(v, c) for v in range(len(splits)) for c in combos]

    def run(cell):
        return _voter_cell(features, labels, splits, cfg, cell[0], cell[1], alphas)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            values = list(pool.map(run, cells))
    else:
        values = [run(cell) for cell in cells]
    return PerformanceTable(np.array(values).reshape(len(splits), len(combos)), combos)


def highest_median_vote(table):
    """Combination with the largest median score across voters.

    Ties fall to the larger mean, then to enumeration order.
    """
    medians = np.median(table.scores, axis=0)
    means = np.mean(table.scores, axis=0)
    best = 0
    for j in range(1, len(table.combos)):
        if medians[j] > medians[best] or (medians[j] == medians[best] and means[j] > means[best]):
            best = j
    return table.combos[best]


def vote_consensus(table, chosen, top):
    """Fraction of voters ranking ``chosen`` within their ``top`` best scores.

    A score equal to the voter's ``top``-th best counts as inside.
    """
    top = min(top, len(table.combos))
    cutoff = -np.sort(-table.scores, axis=1)[:, top - 1]
    return float(np.mean(table.column(chosen) >= cutoff))


def validate_vote(table, chosen, cfg=SelectionConfig()):
    """Keep the vote if consensus reaches ``cfg.thresh``, else the default."""
    if vote_consensus(table, chosen, cfg.top) >= cfg.thresh:
        return chosen
    return cfg.default_combo


def select_features(features, labels, cfg=SelectionConfig(), alphas=DEFAULT_ALPHAS, n_jobs=1):
    """Run the full selection: score, vote, validate.

    Returns
    -------
    combo : ComboId
    table : PerformanceTable
    """
    if cfg.default_combo not in features:
        raise ConfigError(f"default combination {cfg.default_combo.name} was not generated")
    try:
        table = evaluate_combos(features, labels, cfg, alphas, n_jobs)
    except SelfRocketError as exc:
        raise StageError("selection", exc) from exc
    vote = highest_median_vote(table)
    return validate_vote(table, vote, cfg), table
