"""
Loss kernel of the incremental step. Every log argument is clamped to
(EPS, 1 - EPS); gradients vanish where the clamp is active.
"""
from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from lexicon.types import MultiLabel
from wilss.exceptions import ClassSetMismatchError, ShapeMismatchError
from wilss.fusion import image_label_from_pixel
from wilss.pooling import clamp, ngwp_pool, sigmoid, unclamped
from wilss.types import FeatureMap, ImageScores, LossParts, LossWeights, ScoreMap


logger = logging.getLogger(__name__)


def _bce(target: np.ndarray, p: np.ndarray) -> np.ndarray:
    p = clamp(p)
    return -(target * np.log(p) + (1.0 - target) * np.log(1.0 - p))


def _bce_grad_p(target: np.ndarray, p: np.ndarray) -> np.ndarray:
    q = clamp(p)
    return -(target / q - (1.0 - target) / (1.0 - q)) * unclamped(p)


def _label_bits(y: MultiLabel, classes: Sequence[str]) -> np.ndarray:
    return np.array([y.bit(c) for c in classes], dtype=np.float64)


def loss_cls(y: MultiLabel, y_img: ImageScores, classes: Sequence[str]) -> float:
    """Multi-label soft-margin loss averaged over the given classes"""
    if not classes:
        raise ClassSetMismatchError('classification loss needs at least one class')
    return float(np.mean(_bce(_label_bits(y, classes), y_img.of(classes))))


def loss_cls_grad(y: MultiLabel, y_img: ImageScores,
                  classes: Sequence[str]) -> np.ndarray:
    """Gradient with respect to y_img.values; zero outside the given classes"""
    grad = np.zeros_like(y_img.values)
    idx = [y_img.class_order.index(c) for c in classes]
    grad[idx] = _bce_grad_p(_label_bits(y, classes), y_img.of(classes)) / len(classes)
    return grad


def _check_same_layout(a: ScoreMap, b: ScoreMap) -> None:
    if a.class_order != b.class_order:
        raise ClassSetMismatchError(f'{a.class_order} vs {b.class_order}')
    if a.scores.shape != b.scores.shape:
        raise ShapeMismatchError(f'{a.scores.shape} vs {b.scores.shape}')


def loss_seg(target: ScoreMap, y_seg: ScoreMap) -> float:
    """Pixel-level binary cross-entropy of the segmenter against a soft target"""
    _check_same_layout(target, y_seg)
    return float(np.mean(_bce(target.scores, y_seg.scores)))


def loss_seg_grads(target: ScoreMap, y_seg: ScoreMap) -> tuple[np.ndarray, np.ndarray]:
    """Gradients with respect to (target, y_seg)"""
    _check_same_layout(target, y_seg)
    n = target.scores.size
    p = clamp(y_seg.scores)
    grad_target = -(np.log(p) - np.log(1.0 - p)) / n
    return grad_target, _bce_grad_p(target.scores, y_seg.scores) / n


def _feature_diff(e_t: FeatureMap, e_prev: FeatureMap) -> np.ndarray:
    if e_t.vectors.shape != e_prev.vectors.shape:
        raise ShapeMismatchError(f'{e_t.vectors.shape} vs {e_prev.vectors.shape}')
    return e_t.vectors - e_prev.vectors


def loss_kde(e_t: FeatureMap, e_prev: FeatureMap, squared: bool = True) -> float:
    """Mean over pixels of the (squared) Euclidean distance between features"""
    diff = _feature_diff(e_t, e_prev)
    sq = np.sum(diff ** 2, axis=1)
    return float(np.mean(sq if squared else np.sqrt(sq)))


def loss_kde_grad(e_t: FeatureMap, e_prev: FeatureMap, squared: bool = True) -> np.ndarray:
    diff = _feature_diff(e_t, e_prev)
    n = diff.shape[0]
    if squared:
        return 2.0 * diff / n
    norms = np.sqrt(np.sum(diff ** 2, axis=1, keepdims=True))
    return np.divide(diff, norms * n, out=np.zeros_like(diff), where=norms > 0)


def _kdl_inputs(z: ScoreMap, y_prev: ScoreMap, old_classes: Sequence[str]):
    if z.num_pixels != y_prev.num_pixels:
        raise ShapeMismatchError(f'{z.num_pixels} vs {y_prev.num_pixels} pixels')
    if not old_classes:
        raise ClassSetMismatchError('distillation needs at least one old class')
    logits = z.scores[:, z.column_index(old_classes)]
    target = y_prev.scores[:, y_prev.column_index(old_classes)]
    return logits, target


def loss_kdl(z: ScoreMap, y_prev: ScoreMap, old_classes: Sequence[str]) -> float:
    """Localizer logits distilled towards the old model on the old classes"""
    logits, target = _kdl_inputs(z, y_prev, old_classes)
    return float(np.mean(_bce(target, sigmoid(logits))))


def loss_kdl_grad(z: ScoreMap, y_prev: ScoreMap, old_classes: Sequence[str]) -> np.ndarray:
    """Gradient with respect to z.scores; zero outside the old classes"""
    logits, target = _kdl_inputs(z, y_prev, old_classes)
    s = sigmoid(logits)
    grad = np.zeros_like(z.scores)
    grad[:, z.column_index(old_classes)] = (s - target) * unclamped(s) / target.size
    return grad


def total_loss(parts: LossParts, w: LossWeights = LossWeights()) -> float:
    return (w.w_seg * parts.seg + w.w_cls * parts.cls
            + w.w_kde * parts.kde + w.w_kdl * parts.kdl)


def rehearsal_losses(y_prev: ScoreMap, y_seg: ScoreMap, z: ScoreMap | None = None,
                     y_img: ImageScores | None = None,
                     min_pixels: int = 1) -> tuple[float, float]:
    """
    Losses on a rehearsal image: the old model's map is the segmentation
    target (compared on the old classes of the current segmenter) and its
    argmax occupancy is the image label for the localizer. y_img defaults
    to the pooled logits z.
    """
    if y_img is None:
        if z is None:
            raise ClassSetMismatchError('need localizer logits or image scores')
        y_img = ngwp_pool(z)
    old = y_prev.class_order
    seg = loss_seg(y_prev, y_seg.select(old))
    cls = loss_cls(image_label_from_pixel(y_prev, min_pixels), y_img, old)
    return seg, cls
