from __future__ import annotations

import logging

import numpy as np

from lexicon.types import MultiLabel
from wilss.exceptions import ClassSetMismatchError, InvalidMapError, ShapeMismatchError
from wilss.types import ScoreMap, StepContext


logger = logging.getLogger(__name__)


def _check_fusion_inputs(y_loc: ScoreMap, y_prev: ScoreMap, ctx: StepContext) -> None:
    if set(y_loc.class_order) != set(ctx.all_classes):
        raise ClassSetMismatchError(
            f'localizer map covers {y_loc.class_order}, step needs {ctx.all_classes}'
        )
    if set(y_prev.class_order) != set(ctx.old_classes):
        raise ClassSetMismatchError(
            f'old model map covers {y_prev.class_order}, step needs {ctx.old_classes}'
        )
    if y_loc.num_pixels != y_prev.num_pixels:
        raise ShapeMismatchError(
            f'{y_loc.num_pixels} localizer pixels vs {y_prev.num_pixels} old-model pixels'
        )


def fuse_pseudo(y_loc: ScoreMap, y_prev: ScoreMap, ctx: StepContext) -> ScoreMap:
    """
    Pseudo-label over Y^t: background is the smaller of the old model and
    the smoothed localizer, new classes come from the localizer and the
    remaining old classes from the old model.
    """
    _check_fusion_inputs(y_loc, y_prev, ctx)
    loc = y_loc.select(ctx.all_classes).scores
    prev = y_prev.select(ctx.old_classes).scores
    fused = np.empty_like(loc)
    n_old = len(ctx.old_classes)
    fused[:, :n_old] = prev
    fused[:, n_old:] = loc[:, n_old:]
    b = ctx.old_classes.index(ctx.background)
    fused[:, b] = np.minimum(prev[:, b], loc[:, b])
    return ScoreMap(ctx.all_classes, fused)


def fuse_pseudo_backward(y_loc: ScoreMap, y_prev: ScoreMap, ctx: StepContext,
                         grad: np.ndarray) -> np.ndarray:
    """Gradient with respect to the localizer map, columns in ctx.all_classes order"""
    loc = y_loc.select(ctx.all_classes).scores
    prev = y_prev.select(ctx.old_classes).scores
    out = np.zeros_like(grad)
    n_old = len(ctx.old_classes)
    out[:, n_old:] = grad[:, n_old:]
    b = ctx.old_classes.index(ctx.background)
    # ties route to the localizer
    takes_loc = loc[:, b] <= prev[:, b]
    out[:, b] = np.where(takes_loc, grad[:, b], 0.0)
    return out


def image_label_from_pixel(y_prev: ScoreMap, min_pixels: int = 1) -> MultiLabel:
    """A class is present when it wins the per-pixel argmax at least min_pixels times"""
    if min_pixels < 1:
        raise InvalidMapError(f'min_pixels must be at least 1, got {min_pixels}')
    winners = np.argmax(y_prev.scores, axis=1)
    counts = np.bincount(winners, minlength=len(y_prev.class_order))
    present = [c for c, n in zip(y_prev.class_order, counts) if n >= min_pixels]
    return MultiLabel.from_classes(y_prev.class_order, present)
