"""
Localizer-side maps: per-pixel probabilities, normalized global weighted
pooling (nGWP) into image-level scores, and uniform smoothing. Each
forward op has a backward twin returning the gradient of a scalar loss
with respect to its input.
"""
from __future__ import annotations

import numpy as np

from wilss.exceptions import InvalidMapError
from wilss.types import ImageScores, ScoreMap


EPS = 1e-7


def clamp(x: np.ndarray) -> np.ndarray:
    return np.clip(x, EPS, 1.0 - EPS)


def unclamped(x: np.ndarray) -> np.ndarray:
    return (x > EPS) & (x < 1.0 - EPS)


def sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    exps = np.exp(shifted)
    return exps / exps.sum(axis=1, keepdims=True)


def _require_logits(z: ScoreMap) -> None:
    if not z.is_logits:
        raise InvalidMapError('expected a logit map')


def pixel_probabilities(z: ScoreMap) -> ScoreMap:
    """Per-pixel softmax over classes"""
    _require_logits(z)
    return ScoreMap(z.class_order, softmax(z.scores))


def pixel_probabilities_backward(z: ScoreMap, grad: np.ndarray) -> np.ndarray:
    p = softmax(z.scores)
    return p * (grad - np.sum(grad * p, axis=1, keepdims=True))


def _ngwp_raw(z: np.ndarray):
    m = softmax(z)
    s = sigmoid(z)
    denominator = 1.0 + m.sum(axis=0)
    return m, s, denominator, (m * s).sum(axis=0) / denominator


def ngwp_pool(z: ScoreMap) -> ImageScores:
    """
    y_c = sum_i m_ic * sigmoid(z_ic) / (1 + sum_i m_ic), with m the
    per-pixel softmax masks, clamped to (EPS, 1 - EPS).
    """
    _require_logits(z)
    return ImageScores(z.class_order, clamp(_ngwp_raw(z.scores)[3]))


def ngwp_pool_backward(z: ScoreMap, grad: np.ndarray) -> np.ndarray:
    m, s, denominator, y = _ngwp_raw(z.scores)
    a = grad * unclamped(y) / denominator
    t = a * m * (s - y)
    return t + a * m * s * (1.0 - s) - m * t.sum(axis=1, keepdims=True)


def smooth(y: ScoreMap, alpha: float = 0.1) -> ScoreMap:
    if y.is_logits:
        raise InvalidMapError('smoothing applies to probabilities')
    if not 0 <= alpha < 1:
        raise InvalidMapError(f'alpha must lie in [0, 1), got {alpha}')
    k = len(y.class_order)
    return ScoreMap(y.class_order, (1.0 - alpha) * y.scores + alpha / k)


def smooth_backward(grad: np.ndarray, alpha: float = 0.1) -> np.ndarray:
    return (1.0 - alpha) * grad
