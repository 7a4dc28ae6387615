"""
Domain discriminator: a from-scratch MLP over spectrum features, trained
with plain mini-batch SGD on two-class cross-entropy.
"""
from __future__ import annotations

import logging
from typing import Sequence, Union

import numpy as np

from discriminator.exceptions import (
    DimensionMismatchError,
    DivergenceError,
    EmptyClassError,
    InvalidLayerDimsError,
)
from discriminator.types import MlpModel, TrainConfig, TrainingHistory
from imaging.types import SpectrumFeature


logger = logging.getLogger(__name__)

DATASET, WEB = 0, 1

# spectrum features, or bare vectors for toy models
Feature = Union[SpectrumFeature, np.ndarray]


def init_model(layer_dims: Sequence[int], seed: int) -> MlpModel:
    """Glorot-uniform weights, zero biases"""
    dims = tuple(int(d) for d in layer_dims)
    if len(dims) < 2 or dims[-1] != 2 or min(dims) < 1:
        raise InvalidLayerDimsError(f'invalid layer dims {dims}')
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(dims, weights, biases)


def forward(m: MlpModel, f: Feature) -> tuple[float, float]:
    probs = predict_proba(m, _as_matrix([f], m.input_dim))[0]
    return float(probs[DATASET]), float(probs[WEB])


def predict_proba(m: MlpModel, x: np.ndarray) -> np.ndarray:
    activations, _ = _forward_pass(m, x)
    return activations[-1]


def _forward_pass(m: MlpModel, x: np.ndarray):
    activations = [x]
    pre_activations = []
    h = x
    last = len(m.weights) - 1
    for k, (w, b) in enumerate(zip(m.weights, m.biases)):
        z = h @ w + b
        pre_activations.append(z)
        h = softmax(z) if k == last else np.maximum(z, 0.0)
        activations.append(h)
    return activations, pre_activations


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    exps = np.exp(shifted)
    return exps / exps.sum(axis=1, keepdims=True)


def cross_entropy(m: MlpModel, x: np.ndarray, y: np.ndarray) -> float:
    logits = _forward_pass(m, x)[1][-1]
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return float(-np.mean(log_probs[np.arange(len(y)), y]))


def loss_and_gradients(m: MlpModel, x: np.ndarray, y: np.ndarray):
    """Mean cross-entropy over the batch and its gradients per layer"""
    activations, pre_activations = _forward_pass(m, x)
    n = x.shape[0]
    probs = activations[-1]
    loss = float(-np.mean(np.log(np.maximum(probs[np.arange(n), y], 1e-300))))

    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n

    grad_w = [None] * len(m.weights)
    grad_b = [None] * len(m.biases)
    for k in reversed(range(len(m.weights))):
        grad_w[k] = activations[k].T @ delta
        grad_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ m.weights[k].T) * (pre_activations[k - 1] > 0)
    return loss, grad_w, grad_b


def train(m: MlpModel, positives: Sequence[Feature],
          negatives: Sequence[Feature],
          cfg: TrainConfig) -> tuple[MlpModel, TrainingHistory]:
    """
    Positives are dataset features (class 0), negatives are web features
    (class 1). The input model is left untouched.
    """
    if not positives or not negatives:
        raise EmptyClassError('both positive and negative sets must be non-empty')
    x = np.vstack([
        _as_matrix(positives, m.input_dim),
        _as_matrix(negatives, m.input_dim),
    ])
    y = np.concatenate([
        np.full(len(positives), DATASET),
        np.full(len(negatives), WEB),
    ])

    model = m.copy()
    rng = np.random.default_rng(cfg.seed)
    history = TrainingHistory()
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(y)) if cfg.shuffle else np.arange(len(y))
        epoch_losses = []
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            loss, grad_w, grad_b = loss_and_gradients(model, x[batch], y[batch])
            if not np.isfinite(loss):
                raise DivergenceError(epoch, loss)
            epoch_losses.append(loss * len(batch))
            for k in range(len(model.weights)):
                model.weights[k] -= cfg.learning_rate * grad_w[k]
                model.biases[k] -= cfg.learning_rate * grad_b[k]
        if not model.is_finite():
            raise DivergenceError(epoch, float('nan'))

        accuracy = _accuracy(model, x, y)
        history.losses.append(float(np.sum(epoch_losses) / len(y)))
        history.accuracies.append(accuracy)
        logger.info('epoch %d: loss %.6f, training accuracy %.4f',
                    epoch, history.losses[-1], accuracy)
        if cfg.target_accuracy is not None and accuracy >= cfg.target_accuracy:
            history.stopped_early = epoch < cfg.epochs
            break
    return model, history


def evaluate(m: MlpModel, positives: Sequence[Feature],
             negatives: Sequence[Feature]) -> float:
    """Accuracy over a labelled set, e.g. a holdout of unseen classes"""
    if not positives and not negatives:
        raise EmptyClassError('nothing to evaluate')
    features = list(positives) + list(negatives)
    y = np.concatenate([
        np.full(len(positives), DATASET),
        np.full(len(negatives), WEB),
    ]).astype(int)
    return _accuracy(m, _as_matrix(features, m.input_dim), y)


def _accuracy(m: MlpModel, x: np.ndarray, y: np.ndarray) -> float:
    probs = predict_proba(m, x)
    # ties go to the web side, as at the gate
    predicted = np.where(probs[:, DATASET] > probs[:, WEB], DATASET, WEB)
    return float(np.mean(predicted == y))


def _as_matrix(features: Sequence[Feature], input_dim: int) -> np.ndarray:
    rows = [np.asarray(getattr(f, 'values', f), dtype=np.float64) for f in features]
    for row in rows:
        if row.shape != (input_dim,):
            raise DimensionMismatchError(
                f'feature shape {row.shape} does not match model input {input_dim}'
            )
    return np.vstack(rows)
