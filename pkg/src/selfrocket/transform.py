"""MiniRocket-style kernel plans and pooled feature generation.

Column layout of a feature matrix for one representation is kernel-major:
the feature for (kernel ``k``, dilation index ``j``, slot ``s``) sits at
column ``k * sum(features_per_dilation) + sum(features_per_dilation[:j]) + s``.
MIX matrices are the BASE columns followed by the DIFF columns.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._errors import EmptyInputError, SeriesTooShortError, ShapeError
from .combos import ALL_COMBOS, ComboId, Pooling, Representation

__all__ = [
    "KERNEL_INDICES",
    "KERNELS",
    "TransformPlan",
    "first_difference",
    "fit_plan",
    "fit_plans",
    "convolve_dilated",
    "pool",
    "transform",
    "pooling_counter",
]

KERNEL_LENGTH = 9
NUM_KERNELS = 84
DEFAULT_NUM_FEATURES = 9_996
MAX_DILATIONS_PER_KERNEL = 32
GOLDEN_CONJUGATE = 0.618033988749895
MIN_LENGTH = 10
PLAN_FORMAT_VERSION = 1

#: positions of the three 2-weights, lexicographic
KERNEL_INDICES = np.array(list(itertools.combinations(range(KERNEL_LENGTH), 3)), dtype=np.int64)
KERNELS = np.full((NUM_KERNELS, KERNEL_LENGTH), -1.0)
for _k, _idx in enumerate(KERNEL_INDICES):
    KERNELS[_k, _idx] = 2.0
KERNELS.flags.writeable = False

#: pooled feature values computed per operator, for instrumentation
pooling_counter = Counter()


@dataclass(frozen=True)
class TransformPlan:
    """Frozen dilation/bias schedule fitted for one input representation."""

    representation: Representation
    input_length: int
    dilations: np.ndarray
    features_per_dilation: np.ndarray
    biases: np.ndarray
    seed: int = 0

    def __post_init__(self):
        dil = np.array(self.dilations, dtype=np.int64)
        fpd = np.array(self.features_per_dilation, dtype=np.int64)
        biases = np.array(self.biases, dtype=np.float64)
        if dil.shape != fpd.shape or dil.ndim != 1 or len(dil) == 0:
            raise ShapeError("dilations and features_per_dilation must be equal-length 1-D")
        if np.any(dil < 1) or np.any(fpd < 1):
            raise ShapeError("dilations and feature counts must be positive")
        if biases.shape != (NUM_KERNELS * int(fpd.sum()),):
            raise ShapeError(f"expected {NUM_KERNELS * int(fpd.sum())} biases, got {biases.shape}")
        if not np.all(np.isfinite(biases)):
            raise ShapeError("biases must be finite")
        for a in (dil, fpd, biases):
            a.flags.writeable = False
        object.__setattr__(self, "representation", Representation(self.representation))
        object.__setattr__(self, "dilations", dil)
        object.__setattr__(self, "features_per_dilation", fpd)
        object.__setattr__(self, "biases", biases)

    @property
    def num_features(self):
        return NUM_KERNELS * int(self.features_per_dilation.sum())

    @property
    def paddings(self):
        """Per-feature padding flags in column order."""
        flags = []
        for k in range(NUM_KERNELS):
            for j, count in enumerate(self.features_per_dilation):
                flags.extend([(k + j) % 2 == 0] * int(count))
        return np.array(flags)

    def feature_index(self, kernel, dilation_index, slot):
        per_kernel = int(self.features_per_dilation.sum())
        return kernel * per_kernel + int(self.features_per_dilation[:dilation_index].sum()) + slot

    def to_dict(self):
        return {
            "format": "selfrocket-plan",
            "version": PLAN_FORMAT_VERSION,
            "representation": self.representation.name,
            "input_length": int(self.input_length),
            "seed": int(self.seed),
            "dilations": self.dilations.tolist(),
            "features_per_dilation": self.features_per_dilation.tolist(),
            "biases": self.biases.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("format") != "selfrocket-plan" or d.get("version") != PLAN_FORMAT_VERSION:
            raise ValueError(f"unsupported plan blob: {d.get('format')} v{d.get('version')}")
        return cls(
            Representation[d["representation"]],
            int(d["input_length"]),
            d["dilations"],
            d["features_per_dilation"],
            d["biases"],
            int(d["seed"]),
        )

    def to_json(self):
        # float repr round-trips exactly
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, TransformPlan):
            return NotImplemented
        return (
            self.representation == other.representation
            and self.input_length == other.input_length
            and self.seed == other.seed
            and np.array_equal(self.dilations, other.dilations)
            and np.array_equal(self.features_per_dilation, other.features_per_dilation)
            and self.biases.tobytes() == other.biases.tobytes()
        )

    __hash__ = None


def first_difference(x):
    """``x[t+1] - x[t]`` along the last axis."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] < 2:
        raise ShapeError(f"first difference needs length >= 2, got {x.shape[-1]}")
    return np.diff(x, axis=-1)


def apply_representation(X, representation):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if representation is Representation.BASE:
        return X
    if representation is Representation.DIFF:
        return np.ascontiguousarray(first_difference(X))
    raise ValueError("MIX is a feature-level concatenation, not a series transform")


def fit_dilations(input_length, num_features=DEFAULT_NUM_FEATURES,
                  max_dilations_per_kernel=MAX_DILATIONS_PER_KERNEL):
    """Exponentially spaced dilations and the feature slots given to each."""
    per_kernel = num_features // NUM_KERNELS
    if per_kernel < 1:
        raise ValueError(f"num_features must be >= {NUM_KERNELS}")
    m = min(per_kernel, max_dilations_per_kernel)
    multiplier = per_kernel / m
    max_exponent = np.log2((input_length - 1) / (KERNEL_LENGTH - 1))
    dilations, counts = np.unique(
        np.logspace(0, max_exponent, m, base=2).astype(np.int64), return_counts=True
    )
    fpd = (counts * multiplier).astype(np.int64)
    remainder = per_kernel - int(fpd.sum())
    i = 0
    while remainder > 0:
        fpd[i] += 1
        remainder -= 1
        i = (i + 1) % len(fpd)
    return dilations, fpd


def quantile_positions(n):
    return (np.arange(1, n + 1) * GOLDEN_CONJUGATE) % 1


def fit_plan(train, num_features=DEFAULT_NUM_FEATURES, representation=Representation.BASE,
             seed=0, max_dilations_per_kernel=MAX_DILATIONS_PER_KERNEL):
    """Fit dilations and biases on training series.

    Parameters
    ----------
    train : TimeSeriesDataset or array of shape (n, T)
    num_features : int
        Rounded down to a multiple of 84.
    representation : Representation
        BASE or DIFF; the series are transformed before fitting.
    seed : int

    Returns
    -------
    TransformPlan
    """
    representation = Representation(representation)
    X = getattr(train, "series", train)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyInputError("training set is empty")
    X = apply_representation(X, representation)
    n, length = X.shape
    if length < MIN_LENGTH:
        raise SeriesTooShortError(
            f"{representation.name} series length {length} < {MIN_LENGTH}"
        )
    dilations, fpd = fit_dilations(length, num_features, max_dilations_per_kernel)
    per_kernel = int(fpd.sum())
    quantiles = quantile_positions(NUM_KERNELS * per_kernel)
    biases = np.empty(NUM_KERNELS * per_kernel)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(representation)]))
    c = np.empty(length)
    f = 0
    for k in range(NUM_KERNELS):
        for j, d in enumerate(dilations):
            x = X[rng.integers(n)]
            _kernels.convolve_into(x, KERNELS[k], int(d), True, c)
            biases[f:f + fpd[j]] = np.quantile(c, quantiles[f:f + fpd[j]])
            f += fpd[j]
    return TransformPlan(representation, length, dilations, fpd, biases, int(seed))


def fit_plans(train, num_features=DEFAULT_NUM_FEATURES, seed=0):
    """Independent BASE and DIFF plans."""
    return {
        rep: fit_plan(train, num_features, rep, seed)
        for rep in (Representation.BASE, Representation.DIFF)
    }


def convolve_dilated(x, kernel, dilation, padding):
    """Convolve a series with a length-9 kernel at the given dilation.

    Without padding the output has ``len(x) - 8 * dilation`` values; with
    padding the series is zero-padded by ``4 * dilation`` on both sides and
    the output has ``len(x)`` values.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    kernel = np.ascontiguousarray(kernel, dtype=np.float64)
    if kernel.shape != (KERNEL_LENGTH,):
        raise ShapeError(f"kernel must have {KERNEL_LENGTH} weights")
    dilation = int(dilation)
    if dilation < 1:
        raise ShapeError("dilation must be positive")
    if padding:
        out = np.empty(len(x))
    else:
        if (KERNEL_LENGTH - 1) * dilation > len(x) - 1:
            raise ShapeError(
                f"dilation {dilation} too large for unpadded series of length {len(x)}"
            )
        out = np.empty(len(x) - (KERNEL_LENGTH - 1) * dilation)
    _kernels.convolve_into(x, kernel, dilation, bool(padding), out)
    return out


def pool(z, op):
    """Pool an activation map with one operator (``Pooling`` or its name)."""
    z = np.ascontiguousarray(z, dtype=np.float64)
    if z.ndim != 1 or len(z) == 0:
        raise ShapeError("activation map must be a non-empty 1-D array")
    op = Pooling[op] if isinstance(op, str) else Pooling(op)
    slot = np.full(5, -1, dtype=np.int64)
    slot[op] = 0
    out = np.empty((1, 1, 1))
    _kernels.pool_into(z, 0, len(z), 0.0, slot, out, 0, 0)
    return float(out[0, 0, 0])


def _check_plan(X, plan):
    expected = plan.input_length + (1 if plan.representation is Representation.DIFF else 0)
    if X.shape[1] != expected:
        raise ShapeError(f"series length {X.shape[1]} does not match plan length {expected}")


def _compute(X, plans, representations, poolings):
    """Fill one buffer per operator with the columns of each representation."""
    widths = [plans[r].num_features for r in representations]
    buf = np.empty((len(poolings), X.shape[0], sum(widths)))
    slot = np.full(5, -1, dtype=np.int64)
    for i, p in enumerate(poolings):
        slot[p] = i
    offset = 0
    for rep, width in zip(representations, widths):
        plan = plans[rep]
        _check_plan(X, plan)
        Xr = apply_representation(X, rep)
        _kernels.transform_into(
            Xr, KERNELS, plan.dilations, plan.features_per_dilation, plan.biases,
            slot, buf, offset,
        )
        for p in poolings:
            pooling_counter[p.name] += X.shape[0] * width
        pooling_counter[rep.name] += X.shape[0]
        offset += width
    return buf


def transform(ds, plans, combos=None):
    """Pooled feature matrices for each requested combination.

    Parameters
    ----------
    ds : TimeSeriesDataset or array of shape (n, T)
    plans : dict
        ``Representation -> TransformPlan`` for the needed plain representations.
    combos : iterable of ComboId, optional
        Defaults to all 15. Only the pooling operators and representations
        they need are computed.

    Returns
    -------
    dict
        ``ComboId -> ndarray (n, F)``. BASE, DIFF and MIX matrices of the
        same operator are views of one buffer.
    """
    X = np.asarray(getattr(ds, "series", ds), dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError("expected a 2-D array of series")
    combos = ALL_COMBOS if combos is None else tuple(combos)
    poolings = sorted({c.pooling for c in combos})
    reps = sorted({part for c in combos for part in c.representation.parts})
    missing = [r.name for r in reps if r not in plans]
    if missing:
        raise ShapeError(f"no plan for representation(s) {missing}")
    buf = _compute(X, plans, reps, poolings)
    bounds = {}
    offset = 0
    for rep in reps:
        bounds[rep] = (offset, offset + plans[rep].num_features)
        offset += plans[rep].num_features
    out = {}
    for combo in combos:
        parts = combo.representation.parts
        lo = bounds[parts[0]][0]
        hi = bounds[parts[-1]][1]
        out[combo] = buf[poolings.index(combo.pooling), :, lo:hi]
    return out
