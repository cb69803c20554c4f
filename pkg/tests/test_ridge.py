import numpy as np
import pytest

from selfrocket._errors import DegenerateLabelError, InputError, ShapeError
from selfrocket.ridge import (
    DEFAULT_ALPHAS,
    _GramSolver,
    _standardize,
    _targets,
    accuracy,
    decision_function,
    fit_ridge,
    loo_residuals,
    predict,
)

import oracles


def _problem(rng, n, F, n_classes=2):
    X = rng.normal(size=(n, F))
    y = np.arange(n) % n_classes
    X[:, 0] += 2.0 * y
    return X, y


def test_symmetric_two_points():
    X = np.array([[-1.0], [1.0]])
    y = np.array([0, 1])
    for a in DEFAULT_ALPHAS:
        m = fit_ridge(X, y, alphas=[a])
        assert predict(m, X).tolist() == [0, 1]
        s = decision_function(m, np.array([[0.0]]))
        assert s[0, 0] == pytest.approx(s[0, 1])


@pytest.mark.parametrize("n, F", [(20, 50), (50, 20)])
def test_normal_equations(n, F):
    rng = np.random.default_rng(n)
    X, y = _problem(rng, n, F, 3)
    m = fit_ridge(X, y)
    Xs, _, _ = _standardize(X)
    Y = _targets(y, 3)
    Yc = Y - Y.mean(0)
    W = m.weights.T
    resid = (Xs.T @ Xs + m.alpha * np.eye(F)) @ W - Xs.T @ Yc
    assert np.abs(resid).max() < 1e-8


def test_duplicated_problem_predictions():
    """Every column duplicated and alpha doubled: each copy carries half the weight."""
    rng = np.random.default_rng(2)
    X, y = _problem(rng, 25, 8)
    Xt = rng.normal(size=(40, 8))
    a = fit_ridge(X, y, alphas=[1.0])
    b = fit_ridge(np.hstack([X, X]), y, alphas=[2.0])
    np.testing.assert_allclose(b.weights[:, :8], a.weights / 2, atol=1e-8)
    np.testing.assert_allclose(decision_function(b, np.hstack([Xt, Xt])), decision_function(a, Xt), atol=1e-8)
    assert np.array_equal(predict(b, np.hstack([Xt, Xt])), predict(a, Xt))


@pytest.mark.parametrize("seed", range(6))
def test_loo_matches_explicit(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 31))
    F = int(rng.integers(1, 41))
    C = int(rng.integers(2, 4))
    X, y = _problem(rng, n, F, C)
    for alpha in (1e-3, 0.1, 10.0):
        got = loo_residuals(X, y, alpha, C)
        np.testing.assert_allclose(got, oracles.ridge_loo_explicit(X, y, alpha, C), atol=1e-6)


@pytest.mark.parametrize("n, F", [(12, 30), (30, 12)])
def test_loo_both_solve_paths(n, F):
    rng = np.random.default_rng(n * F)
    X, y = _problem(rng, n, F)
    assert _GramSolver(_standardize(X)[0], _targets(y, 2)).dual == (n <= F)
    np.testing.assert_allclose(loo_residuals(X, y, 0.5, 2),
                               oracles.ridge_loo_explicit(X, y, 0.5, 2), atol=1e-8)


def test_weights_shrink_with_alpha():
    rng = np.random.default_rng(5)
    X, y = _problem(rng, 30, 10)
    norms = [np.linalg.norm(fit_ridge(X, y, alphas=[a]).weights) for a in np.logspace(-3, 8, 12)]
    assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))
    assert norms[-1] < 1e-6


def test_column_rescaling_invariance():
    rng = np.random.default_rng(6)
    X, y = _problem(rng, 40, 12, 3)
    Xt = rng.normal(size=(50, 12))
    a = fit_ridge(X, y)
    scale = np.ones(12)
    scale[3] = 1e4
    b = fit_ridge(X * scale, y)
    sa = decision_function(a, Xt)
    top2 = np.sort(sa, axis=1)[:, -2:]
    clear = top2[:, 1] - top2[:, 0] > 1e-9
    assert np.array_equal(predict(a, Xt)[clear], predict(b, Xt * scale)[clear])


def test_zero_row_picks_largest_intercept():
    X = np.array([[1.0], [2.0], [3.0], [-1.0], [-2.0]])
    y = np.array([0, 0, 0, 1, 1])
    m = fit_ridge(X, y)
    # a row at the training mean scores the intercepts
    row = m.feature_means[None, :]
    assert predict(m, row)[0] == int(np.argmax(m.intercepts)) == 0


def test_separable_resubstitution():
    rng = np.random.default_rng(7)
    X, y = _problem(rng, 30, 3)
    X[:, 0] = np.where(y == 1, 5.0, -5.0) + 0.01 * rng.normal(size=30)
    m = fit_ridge(X, y)
    assert accuracy(y, predict(m, X)) == 1.0
    eps = predict(m, X + 1e-13)
    assert np.array_equal(eps, predict(m, X))


def test_constant_columns_are_safe():
    X = np.ones((10, 4))
    X[:, 1] = np.arange(10)
    m = fit_ridge(X, np.arange(10) % 2)
    assert np.all(np.isfinite(m.weights))


def test_errors():
    X = np.zeros((4, 2))
    with pytest.raises(DegenerateLabelError):
        fit_ridge(X, [1, 1, 1, 1])
    with pytest.raises(InputError):
        fit_ridge(np.array([[np.nan, 0], [0, 1]]), [0, 1])
    m = fit_ridge(np.arange(8.0).reshape(4, 2), [0, 1, 0, 1])
    with pytest.raises(ShapeError):
        predict(m, np.zeros((2, 3)))


@pytest.mark.parametrize("a, b, expected", [
    ([0, 1, 1], [0, 1, 1], 1.0),
    ([0, 1, 1], [1, 0, 0], 0.0),
    ([0, 1, 1, 0], [0, 1, 0, 0], 0.75),
])
def test_accuracy(a, b, expected):
    assert accuracy(a, b) == expected


def test_accuracy_mismatch():
    with pytest.raises(ShapeError):
        accuracy([0, 1], [0])
    with pytest.raises(ShapeError):
        accuracy([], [])
