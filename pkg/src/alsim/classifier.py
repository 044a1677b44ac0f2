"""Multinomial logistic regression trained from scratch.

The model supplies calibrated class probabilities for the uncertainty term
and the accuracy metric.  Training is deterministic: zero-initialized
weights, full-batch gradient descent on mean cross-entropy plus an L2
penalty (applied to all coefficients including the bias column), and a fixed
epoch count.  Determinism matters because greedy sessions and the
brute-force verifier must reproduce each other's models exactly.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .data import LabeledSet, Pool


def softmax(scores: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max-score subtraction for stability."""
    shifted = scores - scores.max(axis=1, keepdims=True)
    np.exp(shifted, out=shifted)
    shifted /= shifted.sum(axis=1, keepdims=True)
    return shifted


def augment(X: np.ndarray) -> np.ndarray:
    """Append a constant-1 bias column."""
    return np.hstack([X, np.ones((X.shape[0], 1))])


def loss_and_gradient(
    weights: np.ndarray, X: np.ndarray, y: np.ndarray, n_classes: int, l2_lambda: float
) -> tuple[float, np.ndarray]:
    """Mean cross-entropy + (l2_lambda/2)*||W||^2 and its analytic gradient.

    ``weights`` has shape (n_classes, d+1) with the bias in the last column;
    ``X`` is unaugmented (k, d).  This is the reference form checked against
    central finite differences in the tests; ``SoftmaxClassifier.fit`` takes
    identical steps.
    """
    Xa = augment(X)
    k = Xa.shape[0]
    probs = softmax(Xa @ weights.T)
    rows = np.arange(k)
    loss = -np.mean(np.log(probs[rows, y])) + 0.5 * l2_lambda * float(np.sum(weights**2))
    probs[rows, y] -= 1.0
    grad = probs.T @ Xa / k + l2_lambda * weights
    return float(loss), grad


@njit(cache=True)
def _gd_train(Xa, y, n_classes, learning_rate, l2_lambda, epochs):  # pragma: no cover - compiled
    """Full-batch gradient-descent loop, compiled for the hot path.

    Same update as ``loss_and_gradient`` (mean cross-entropy + L2 on every
    coefficient), written with explicit loops so the result is independent
    of BLAS and identical on every run.
    """
    k, dp1 = Xa.shape
    weights = np.zeros((n_classes, dp1))
    probs = np.empty((k, n_classes))
    shrink = 1.0 - learning_rate * l2_lambda
    scale = learning_rate / k
    for _ in range(epochs):
        for i in range(k):
            top = -np.inf
            for c in range(n_classes):
                s = 0.0
                for j in range(dp1):
                    s += weights[c, j] * Xa[i, j]
                probs[i, c] = s
                if s > top:
                    top = s
            total = 0.0
            for c in range(n_classes):
                e = np.exp(probs[i, c] - top)
                probs[i, c] = e
                total += e
            for c in range(n_classes):
                probs[i, c] /= total
            probs[i, y[i]] -= 1.0
        for c in range(n_classes):
            for j in range(dp1):
                g = 0.0
                for i in range(k):
                    g += probs[i, c] * Xa[i, j]
                weights[c, j] = weights[c, j] * shrink - scale * g
    return weights


class SoftmaxClassifier(BaseEstimator, ClassifierMixin):
    """Multinomial logistic regression over a fixed class vocabulary.

    Unlike estimators that infer classes from ``y``, the class count is fixed
    at construction so ``predict_proba`` always spans the whole vocabulary,
    even for classes absent from the training set.

    Parameters
    ----------
    n_classes : number of activity classes (>= 2).
    l2_lambda : L2 penalty weight (>= 0), applied to all coefficients.
    learning_rate : gradient-descent step size (> 0).
    epochs : fixed number of full-batch steps (> 0).
    """

    def __init__(self, n_classes: int = 2, l2_lambda: float = 1e-3,
                 learning_rate: float = 0.5, epochs: int = 300):
        self.n_classes = n_classes
        self.l2_lambda = l2_lambda
        self.learning_rate = learning_rate
        self.epochs = epochs

    def _check_params(self):
        if self.n_classes < 2:
            raise ValueError(f"n_classes must be >= 2, got {self.n_classes}")
        if self.l2_lambda < 0:
            raise ValueError(f"l2_lambda must be >= 0, got {self.l2_lambda}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs <= 0:
            raise ValueError(f"epochs must be > 0, got {self.epochs}")

    def fit(self, X, y):
        """Train from zero-initialized weights; fully deterministic."""
        self._check_params()
        X = check_array(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ValueError(f"y has shape {y.shape}, expected ({X.shape[0]},)")
        if y.size == 0:
            raise ValueError("cannot fit on an empty labeled set")
        if y.min() < 0 or y.max() >= self.n_classes:
            raise ValueError(f"labels must lie in [0, {self.n_classes}), got range [{y.min()}, {y.max()}]")

        Xa = np.ascontiguousarray(augment(X))
        self.weights_ = _gd_train(
            Xa, np.ascontiguousarray(y), self.n_classes,
            float(self.learning_rate), float(self.l2_lambda), int(self.epochs),
        )
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.arange(self.n_classes)
        return self

    def _scores(self, X) -> np.ndarray:
        check_is_fitted(self, "weights_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, model expects {self.n_features_in_}")
        return augment(X) @ self.weights_.T

    def predict_proba(self, X) -> np.ndarray:
        """Class distribution per row; each row sums to 1 within 1e-9."""
        return softmax(self._scores(X))

    def predict(self, X) -> np.ndarray:
        """Argmax class per row; ties break toward the lowest class index."""
        return np.argmax(self._scores(X), axis=1)


def fit_labeled_set(labeled: LabeledSet, n_classes: int, **params) -> SoftmaxClassifier:
    """Fit a classifier on a session's labeled set (assigned labels, which
    may be wrong; the model never sees ground truth)."""
    if len(labeled) == 0:
        raise ValueError("cannot fit on an empty labeled set")
    clf = SoftmaxClassifier(n_classes=n_classes, **params)
    return clf.fit(labeled.feature_matrix(), labeled.labels())


def accuracy(model: SoftmaxClassifier, test: Pool) -> float:
    """Fraction of test observations whose predicted class equals the truth."""
    if len(test) == 0:
        raise ValueError("test pool is empty")
    pred = model.predict(test.feature_matrix())
    return float(np.mean(pred == test.true_labels()))


def feature_scaler(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature mean and population std; constant features get std 1."""
    mu = X.mean(axis=0)
    sigma = X.std(axis=0)
    sigma = np.where(sigma == 0.0, 1.0, sigma)
    return mu, sigma
