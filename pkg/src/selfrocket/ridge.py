"""Closed-form ridge classifier with leave-one-out alpha selection.

Features are standardized with training means and population standard
deviations (floored at ``SCALE_EPS``). Targets are one-vs-rest ``+/-1``
columns. For every candidate alpha the leave-one-out residuals are
obtained from the hat-matrix diagonal of one eigendecomposition of the
smaller of the two centered Gram matrices, shared by the whole grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._errors import DegenerateLabelError, InputError, ShapeError

__all__ = ["RidgeModel", "DEFAULT_ALPHAS", "fit_ridge", "predict", "decision_function", "accuracy"]

DEFAULT_ALPHAS = np.logspace(-3, 3, 10)
SCALE_EPS = 1e-8


@dataclass(frozen=True)
class RidgeModel:
    weights: np.ndarray  # (n_classes, F), on standardized features
    intercepts: np.ndarray  # (n_classes,)
    alpha: float
    feature_means: np.ndarray
    feature_scales: np.ndarray

    @property
    def n_classes(self):
        return self.weights.shape[0]

    @property
    def n_features(self):
        return self.weights.shape[1]


def _targets(labels, n_classes):
    Y = -np.ones((len(labels), n_classes))
    Y[np.arange(len(labels)), labels] = 1.0
    return Y


def _standardize(X):
    means = X.mean(axis=0)
    Xc = X - means
    scales = np.maximum(np.sqrt(np.mean(Xc * Xc, axis=0)), SCALE_EPS)
    Xc /= scales
    return Xc, means, scales


class _GramSolver:
    """Ridge solutions for many alphas from one eigendecomposition.

    ``Xs`` must have centered columns; the unpenalized intercept is the
    target mean.
    """

    def __init__(self, Xs, Y):
        self.n, self.F = Xs.shape
        self.Xs = Xs
        self.Y_mean = Y.mean(axis=0)
        self.Yc = Y - self.Y_mean
        self.dual = self.n <= self.F
        if self.dual:
            s, U = np.linalg.eigh(Xs @ Xs.T)
            self.s = np.clip(s, 0.0, None)
            self.U = U
            self.UtY = U.T @ self.Yc
            self.U2 = U * U
        else:
            s, V = np.linalg.eigh(Xs.T @ Xs)
            self.s = np.clip(s, 0.0, None)
            self.V = V
            XV = Xs @ V
            self.XV = XV
            self.XV2 = XV * XV
            self.VtXtY = XV.T @ self.Yc

    def loo_residuals(self, alpha):
        """Leave-one-out residuals ``(n, n_classes)`` for one alpha."""
        if self.dual:
            shrink = self.s / (self.s + alpha)
            fitted = self.U @ (shrink[:, None] * self.UtY)
            # 1 - h_ii summed over the complement, minus the constant direction
            one_minus_h = self.U2 @ (alpha / (self.s + alpha)) - 1.0 / self.n
        else:
            inv = 1.0 / (self.s + alpha)
            fitted = self.XV @ (inv[:, None] * self.VtXtY)
            one_minus_h = 1.0 - 1.0 / self.n - self.XV2 @ inv
        return (self.Yc - fitted) / one_minus_h[:, None]

    def weights(self, alpha):
        if self.dual:
            coef = self.U @ (self.UtY / (self.s + alpha)[:, None])
            return (self.Xs.T @ coef).T
        return (self.V @ (self.VtXtY / (self.s + alpha)[:, None])).T


def _check_features(X, what="features"):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError(f"{what} must be 2-D, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InputError(f"{what} contain non-finite values")
    return X


def fit_ridge(features, labels, alphas=DEFAULT_ALPHAS, n_classes=None):
    """Fit a one-vs-rest ridge classifier, choosing alpha by LOO error.

    Parameters
    ----------
    features : array of shape (n, F)
    labels : array of shape (n,)
        Integer class ids.
    alphas : sequence of float
        Candidate regularization strengths; the first of equally good ones wins.
    n_classes : int, optional
        Number of output rows; defaults to ``max(labels) + 1``.

    Returns
    -------
    RidgeModel
    """
    X = _check_features(features)
    y = np.asarray(labels, dtype=np.int64)
    n, F = X.shape
    if y.shape != (n,):
        raise ShapeError(f"{len(y)} labels for {n} rows")
    if n < 2 or F < 1:
        raise ShapeError(f"need n >= 2 and F >= 1, got {X.shape}")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    if len(np.unique(y)) < 2:
        raise DegenerateLabelError("ridge classifier needs at least 2 classes present")
    n_classes = max(n_classes, 2)
    Xs, means, scales = _standardize(X)
    solver = _GramSolver(Xs, _targets(y, n_classes))
    alphas = np.asarray(alphas, dtype=np.float64)
    errors = [np.mean(solver.loo_residuals(a) ** 2) for a in alphas]
    alpha = float(alphas[int(np.argmin(errors))])
    return RidgeModel(
        weights=solver.weights(alpha),
        intercepts=solver.Y_mean.copy(),
        alpha=alpha,
        feature_means=means,
        feature_scales=scales,
    )


def loo_residuals(features, labels, alpha, n_classes=None):
    """Closed-form leave-one-out residuals of the ridge fit at one alpha.

    The standardization is fitted once on all rows and held fixed; only the
    ridge solve (with intercept) is left out.
    """
    X = _check_features(features)
    y = np.asarray(labels, dtype=np.int64)
    if n_classes is None:
        n_classes = int(y.max()) + 1
    Xs, _, _ = _standardize(X)
    return _GramSolver(Xs, _targets(y, max(n_classes, 2))).loo_residuals(float(alpha))


def decision_function(model, features):
    X = _check_features(features)
    if X.shape[1] != model.n_features:
        raise ShapeError(f"model expects {model.n_features} features, got {X.shape[1]}")
    Xs = (X - model.feature_means) / model.feature_scales
    return Xs @ model.weights.T + model.intercepts


def predict(model, features):
    """Class ids by argmax score; ties go to the lowest id."""
    return np.argmax(decision_function(model, features), axis=1)


def accuracy(y_true, y_pred):
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ShapeError(f"length mismatch: {y_true.shape} vs {y_pred.shape}")
    if len(y_true) == 0:
        raise ShapeError("accuracy of an empty prediction set")
    return float(np.mean(y_true == y_pred))
