"""Small synthetic datasets with a known answer for the selection module.

``spike_amplitude`` puts one spike per series on white noise; the two
classes differ only in the spike height, so the sign pattern of a series
carries no class information while its maximum does. ``spike_sign`` flips
the spike instead, which changes how many activations turn positive.
``shuffled_noise`` has no signal at all.
"""

from __future__ import annotations

import numpy as np

from .data import TimeSeriesDataset

__all__ = ["spike_amplitude", "spike_sign", "shuffled_noise", "nearest_centroid_accuracy"]


def spike_amplitude(n=200, length=256, seed=0, low=6.0, high=12.0, noise=1.0):
    """Balanced two-class set separated by spike height only.

    Spike positions are uniform in ``[10, length - 10)`` and independent of
    the class.
    """
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % 2
    series = rng.normal(0.0, noise, (n, length))
    where = rng.integers(10, length - 10, n)
    series[np.arange(n), where] += np.where(labels == 1, high, low)
    return TimeSeriesDataset(series, labels, ("low", "high"), "spike_amplitude")


def spike_sign(n=200, length=256, seed=0, height=8.0, noise=1.0):
    """Balanced two-class set: one spike of height ``+height`` or ``-height``."""
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % 2
    series = rng.normal(0.0, noise, (n, length))
    where = rng.integers(10, length - 10, n)
    series[np.arange(n), where] += np.where(labels == 1, height, -height)
    return TimeSeriesDataset(series, labels, ("down", "up"), "spike_sign")


def shuffled_noise(n=200, length=128, seed=0):
    """Gaussian noise with randomly permuted balanced labels."""
    rng = np.random.default_rng(seed)
    series = rng.normal(size=(n, length))
    labels = rng.permutation(np.arange(n) % 2)
    return TimeSeriesDataset(series, labels, ("a", "b"), "shuffled_noise")


def nearest_centroid_accuracy(train_x, train_y, test_x, test_y):
    """Accuracy of a Euclidean nearest-centroid rule on summary vectors.

    Parameters
    ----------
    train_x, test_x : ndarray of shape (n, d)
    train_y, test_y : ndarray of shape (n,)
    """
    train_x = np.asarray(train_x, dtype=float).reshape(len(train_y), -1)
    test_x = np.asarray(test_x, dtype=float).reshape(len(test_y), -1)
    classes = np.unique(train_y)
    centroids = np.stack([train_x[train_y == c].mean(axis=0) for c in classes])
    d = ((test_x[:, None, :] - centroids[None]) ** 2).sum(axis=2)
    return float(np.mean(classes[np.argmin(d, axis=1)] == test_y))
