"""In-repo comparison learners: Gaussian Naive Bayes and a simple logistic
regression, sharing the train/predict surface of the tree code."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import TrainingError

VARIANCE_FLOOR = 1e-6
LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class NBModel:
    """Per-class priors and per-attribute normal likelihoods.

    ``means``/``variances`` rows are [negative, positive]; a NaN mean marks
    an attribute with no observed values for that class.
    """

    attributes: tuple[str, ...]
    log_priors: np.ndarray    # shape (2,), -inf for an absent class
    means: np.ndarray         # shape (2, n_attrs)
    variances: np.ndarray     # shape (2, n_attrs), floored

    @property
    def classes(self) -> tuple[bool, bool]:
        return (False, True)


def nb_train(train: Dataset) -> NBModel:
    """Fit Gaussian likelihoods per class and attribute.

    Missing cells are ignored per attribute; variances are floored at
    ``VARIANCE_FLOOR`` so constant columns survive.
    """
    if not train.binary:
        raise TrainingError(f"{train.name}: labels must be binarized first")
    if len(train) == 0:
        raise TrainingError(f"{train.name}: empty training set")
    n_attrs = len(train.attributes)
    log_priors = np.full(2, -np.inf)
    means = np.full((2, n_attrs), np.nan)
    variances = np.full((2, n_attrs), VARIANCE_FLOOR)
    for k, flag in enumerate((False, True)):
        rows = train.values[train.labels == flag]
        if len(rows) == 0:
            continue
        log_priors[k] = math.log(len(rows) / len(train))
        for j in range(n_attrs):
            col = rows[:, j]
            col = col[~np.isnan(col)]
            if len(col) == 0:
                continue
            means[k, j] = col.mean()
            variances[k, j] = max(float(col.var()), VARIANCE_FLOOR)
    return NBModel(attributes=train.attributes, log_priors=log_priors,
                   means=means, variances=variances)


def _nb_log_joint(model: NBModel, values: np.ndarray) -> np.ndarray:
    """Log prior + log likelihood per class for one row of attribute values."""
    out = model.log_priors.copy()
    for k in range(2):
        if not np.isfinite(out[k]):
            continue
        for j, x in enumerate(values):
            mu = model.means[k, j]
            if np.isnan(x) or np.isnan(mu):
                continue
            var = model.variances[k, j]
            out[k] += -0.5 * (LOG_2PI + math.log(var)) - (x - mu) ** 2 / (2 * var)
    return out


def nb_posterior(model: NBModel, row) -> float:
    """P(positive | row), with missing attributes skipped."""
    values = _row_values(model.attributes, row)
    joint = _nb_log_joint(model, values)
    if not np.isfinite(joint[1]):
        return 0.0
    if not np.isfinite(joint[0]):
        return 1.0
    m = max(joint)
    weights = np.exp(joint - m)
    return float(weights[1] / weights.sum())


def nb_predict(model: NBModel, row) -> bool:
    return nb_posterior(model, row) >= 0.5


def nb_score_dataset(model: NBModel, data: Dataset) -> np.ndarray:
    _check_schema(model.attributes, data)
    return np.array([nb_posterior(model, data.row(i)) for i in range(len(data))])


def nb_predict_dataset(model: NBModel, data: Dataset) -> np.ndarray:
    return nb_score_dataset(model, data) >= 0.5


@dataclass(frozen=True)
class LogisticModel:
    attributes: tuple[str, ...]
    weights: np.ndarray
    bias: float
    feature_means: np.ndarray
    feature_stds: np.ndarray


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss(weights: np.ndarray, bias: float, X: np.ndarray,
                  y: np.ndarray) -> float:
    """Mean cross-entropy on an already standardized design matrix."""
    z = X @ weights + bias
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def logistic_gradient(weights: np.ndarray, bias: float, X: np.ndarray,
                      y: np.ndarray) -> tuple[np.ndarray, float]:
    """Analytic gradient of :func:`logistic_loss` in (weights, bias)."""
    err = _sigmoid(X @ weights + bias) - y
    return X.T @ err / len(y), float(err.mean())


def _standardize(values: np.ndarray):
    means = np.nanmean(values, axis=0)
    stds = np.nanstd(values, axis=0)
    means = np.where(np.isnan(means), 0.0, means)
    stds = np.where((stds == 0) | np.isnan(stds), 1.0, stds)
    X = (values - means) / stds
    return np.where(np.isnan(X), 0.0, X), means, stds


def lr_train(train: Dataset, epochs: int = 500,
             learning_rate: float = 0.1) -> LogisticModel:
    """Full-batch gradient descent from zero weights on standardized
    features; deterministic, no regularization.  Missing cells standardize
    to 0 (the attribute mean)."""
    if not train.binary:
        raise TrainingError(f"{train.name}: labels must be binarized first")
    if len(train) == 0:
        raise TrainingError(f"{train.name}: empty training set")
    y = train.labels.astype(float)
    if y.min() == y.max():
        raise TrainingError(
            f"{train.name}: logistic regression needs both classes present")
    X, means, stds = _standardize(train.values)
    weights = np.zeros(X.shape[1])
    bias = 0.0
    for _ in range(epochs):
        gw, gb = logistic_gradient(weights, bias, X, y)
        weights -= learning_rate * gw
        bias -= learning_rate * gb
    return LogisticModel(attributes=train.attributes, weights=weights,
                         bias=bias, feature_means=means, feature_stds=stds)


def lr_probability(model: LogisticModel, row) -> float:
    values = _row_values(model.attributes, row)
    x = (values - model.feature_means) / model.feature_stds
    x = np.where(np.isnan(x), 0.0, x)
    return float(_sigmoid(np.atleast_1d(x @ model.weights + model.bias))[0])


def lr_predict(model: LogisticModel, row) -> bool:
    return lr_probability(model, row) >= 0.5


def lr_score_dataset(model: LogisticModel, data: Dataset) -> np.ndarray:
    _check_schema(model.attributes, data)
    X = (data.values - model.feature_means) / model.feature_stds
    X = np.where(np.isnan(X), 0.0, X)
    return _sigmoid(X @ model.weights + model.bias)


def lr_predict_dataset(model: LogisticModel, data: Dataset) -> np.ndarray:
    return lr_score_dataset(model, data) >= 0.5


def _row_values(attributes, row) -> np.ndarray:
    if hasattr(row, "get"):
        return np.array([float(row.get(a, math.nan))
                         if row.get(a, None) is not None else math.nan
                         for a in attributes])
    return np.asarray(row, dtype=float)


def _check_schema(attributes, data: Dataset):
    if tuple(data.attributes) != tuple(attributes):
        raise TrainingError(
            f"{data.name}: attribute mismatch with the trained model "
            f"(model: {list(attributes)}, data: {list(data.attributes)})")
