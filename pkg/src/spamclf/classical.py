"""From-scratch classical classifiers over mean-pooled document vectors:
Gaussian naive Bayes, L2-regularized logistic regression trained by
full-batch gradient descent, and a linear SVM trained with the Pegasos
stochastic subgradient schedule.

Labels are ints with spam = 1 (the positive class). Prediction functions
take a single feature vector and return (label, score); scoring a batch is
a plain loop, which keeps results independent of how callers partition
their data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DataError, NumericError


@dataclass(frozen=True)
class GaussianNbModel:
    class_priors: np.ndarray  # (2,), index 0 = ham, 1 = spam
    means: np.ndarray         # (2, d)
    variances: np.ndarray     # (2, d), smoothed strictly positive


@dataclass(frozen=True)
class LogRegModel:
    weights: np.ndarray
    bias: float
    l2_lambda: float
    max_iter: int


@dataclass(frozen=True)
class LinearSvmModel:
    weights: np.ndarray
    bias: float
    c: float


def _check_two_classes(ys: np.ndarray) -> None:
    present = set(np.unique(ys).tolist())
    if present != {0, 1}:
        raise DataError(f"training data must contain both classes, got labels {sorted(present)}")


def _sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


# --------------------------------------------------------------------------
# Gaussian naive Bayes
# --------------------------------------------------------------------------

def train_gnb(xs: np.ndarray, ys: np.ndarray) -> GaussianNbModel:
    """Per-class feature means/variances plus class priors.

    Variances are smoothed by 1e-9 times the largest pooled per-feature
    variance (falling back to 1e-9 if the data is globally constant) so
    near-constant embedding dimensions cannot zero out a likelihood.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys)
    _check_two_classes(ys)
    pooled_max = float(xs.var(axis=0).max())
    eps = 1e-9 * pooled_max if pooled_max > 0 else 1e-9
    priors = np.array([(ys == c).mean() for c in (0, 1)])
    means = np.stack([xs[ys == c].mean(axis=0) for c in (0, 1)])
    variances = np.stack([xs[ys == c].var(axis=0) + eps for c in (0, 1)])
    return GaussianNbModel(class_priors=priors, means=means, variances=variances)


def gnb_log_posteriors(model: GaussianNbModel, x: np.ndarray) -> np.ndarray:
    """Unnormalized log posterior per class (log prior + log likelihood)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.means.shape[1:]:
        raise DataError(f"feature dim {x.shape} does not match model dim {model.means.shape[1:]}")
    log_lik = -0.5 * (
        np.log(2.0 * np.pi * model.variances) + (x - model.means) ** 2 / model.variances
    ).sum(axis=1)
    return np.log(model.class_priors) + log_lik


def predict_gnb(model: GaussianNbModel, x: np.ndarray) -> tuple[int, float]:
    """Label plus the log-posterior margin (spam minus ham); ties go to spam."""
    lp = gnb_log_posteriors(model, x)
    score = float(lp[1] - lp[0])
    return (1 if score >= 0 else 0), score


# --------------------------------------------------------------------------
# Logistic regression
# --------------------------------------------------------------------------

def logreg_loss(w: np.ndarray, b: float, xs: np.ndarray, ys: np.ndarray, l2_lambda: float) -> float:
    """Mean binary cross-entropy plus (lambda/2)||w||^2 (bias unregularized).

    Evaluated through the logits (softplus form) so saturated predictions
    cannot overflow.
    """
    z = xs @ w + b
    # softplus(z) - y*z == -[y log p + (1-y) log(1-p)] for p = sigmoid(z)
    softplus = np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))
    bce = float(np.mean(softplus - ys * z))
    return bce + 0.5 * l2_lambda * float(w @ w)


def logreg_gradient(
    w: np.ndarray, b: float, xs: np.ndarray, ys: np.ndarray, l2_lambda: float
) -> tuple[np.ndarray, float]:
    p = _sigmoid(xs @ w + b)
    n = len(ys)
    grad_w = xs.T @ (p - ys) / n + l2_lambda * w
    grad_b = float(np.mean(p - ys))
    return grad_w, grad_b


def train_logreg(
    xs: np.ndarray,
    ys: np.ndarray,
    l2_lambda: float = 1e-4,
    max_iter: int = 1000,
    lr: float = 0.1,
) -> LogRegModel:
    """Full-batch gradient descent from zero init; stops at max_iter or when
    the loss improves by less than 1e-8.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    _check_two_classes(ys.astype(int))
    w = np.zeros(xs.shape[1])
    b = 0.0
    prev_loss = logreg_loss(w, b, xs, ys, l2_lambda)
    for _ in range(max_iter):
        grad_w, grad_b = logreg_gradient(w, b, xs, ys, l2_lambda)
        w = w - lr * grad_w
        b = b - lr * grad_b
        loss = logreg_loss(w, b, xs, ys, l2_lambda)
        if not np.isfinite(loss):
            raise NumericError("logistic regression diverged (non-finite loss); reduce lr")
        if abs(prev_loss - loss) < 1e-8:
            break
        prev_loss = loss
    return LogRegModel(weights=w, bias=b, l2_lambda=l2_lambda, max_iter=max_iter)


def predict_logreg(model: LogRegModel, x: np.ndarray) -> tuple[int, float]:
    """Label plus spam probability; probability 0.5 counts as spam."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.weights.shape:
        raise DataError(f"feature dim {x.shape} does not match model dim {model.weights.shape}")
    p = float(_sigmoid(np.array(model.weights @ x + model.bias)))
    return (1 if p >= 0.5 else 0), p


# --------------------------------------------------------------------------
# Linear SVM (Pegasos)
# --------------------------------------------------------------------------

def svm_objective(w: np.ndarray, b: float, xs: np.ndarray, ys_pm: np.ndarray, c: float) -> float:
    """Primal objective 0.5||w||^2 + c * sum(hinge)."""
    margins = ys_pm * (xs @ w + b)
    return 0.5 * float(w @ w) + c * float(np.maximum(0.0, 1.0 - margins).sum())


def train_linear_svm(
    xs: np.ndarray,
    ys: np.ndarray,
    c: float = 1.0,
    epochs: int = 100,
    seed: int = 42,
    on_epoch: Callable[[int, float], None] | None = None,
) -> LinearSvmModel:
    """Pegasos stochastic subgradient descent with a deterministic seeded
    shuffle per epoch, step size 1/(lambda*t) with lambda = 1/(c*n), and an
    unregularized bias. Returns the suffix-averaged iterate (averaged over
    the final half of the epochs), which sheds the wild early steps the
    1/(lambda*t) schedule produces.

    `on_epoch` receives (epoch, primal objective of the running average).
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys)
    _check_two_classes(ys)
    if epochs < 1:
        raise DataError("linear SVM training needs at least one epoch")
    ys_pm = np.where(ys == 1, 1.0, -1.0)
    n = len(ys_pm)
    lam = 1.0 / (c * n)
    rng = np.random.default_rng(seed)

    w = np.zeros(xs.shape[1])
    b = 0.0
    w_all = np.zeros_like(w)
    b_all = 0.0
    w_tail = np.zeros_like(w)
    b_tail = 0.0
    t = 0
    n_tail = 0
    tail_start = epochs // 2
    for epoch in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            margin = ys_pm[i] * (w @ xs[i] + b)
            w = (1.0 - eta * lam) * w
            if margin < 1.0:
                w = w + eta * ys_pm[i] * xs[i]
                b = b + eta * ys_pm[i]
            w_all += w
            b_all += b
            if epoch >= tail_start:
                w_tail += w
                b_tail += b
                n_tail += 1
        if on_epoch is not None:
            if n_tail:
                avg_w, avg_b = w_tail / n_tail, b_tail / n_tail
            else:
                avg_w, avg_b = w_all / t, b_all / t
            on_epoch(epoch, svm_objective(avg_w, avg_b, xs, ys_pm, c))
    return LinearSvmModel(weights=w_tail / n_tail, bias=b_tail / n_tail, c=c)


def predict_svm(model: LinearSvmModel, x: np.ndarray) -> tuple[int, float]:
    """Label plus the signed margin; a point on the hyperplane is spam."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.weights.shape:
        raise DataError(f"feature dim {x.shape} does not match model dim {model.weights.shape}")
    score = float(model.weights @ x + model.bias)
    return (1 if score >= 0 else 0), score
