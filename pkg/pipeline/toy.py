"""
Desk-scale stand-in for the segmentation step. A shared linear encoder
maps per-pixel features (RGB, position, bias) to embeddings; a sigmoid
decoder gives the segmenter map and a linear head gives localizer logits.
The old model is a frozen copy with the old classes only. Training is
full-batch gradient descent on the exact gradient of the total loss,
pseudo-label fusion included.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import dataclass_factory
import numpy as np

from imaging.loaders import load_image
from imaging.types import RasterImage
from lexicon.types import MultiLabel
from pipeline.exceptions import ToyDivergenceError, ToyModelError, TrainingManifestError
from pipeline.types import RehearsalRow, TrainingRow, TrainingSummary
from wilss.exceptions import ClassSetMismatchError, InvalidMapError, MapFormatError, NonFiniteLossError
from wilss.fusion import fuse_pseudo, fuse_pseudo_backward, image_label_from_pixel
from wilss.losses import (
    loss_cls,
    loss_cls_grad,
    loss_kde,
    loss_kde_grad,
    loss_kdl,
    loss_kdl_grad,
    loss_seg,
    loss_seg_grads,
    total_loss,
)
from wilss.storage import load_map, save_map
from wilss.pooling import (
    ngwp_pool,
    ngwp_pool_backward,
    pixel_probabilities,
    pixel_probabilities_backward,
    sigmoid,
    smooth,
    smooth_backward,
)
from wilss.types import FeatureMap, LossParts, LossWeights, ScoreMap, StepContext


logger = logging.getLogger(__name__)

PIXEL_FEATURES = 6
INIT_SCALE = 0.1


def pixel_features(img: RasterImage) -> np.ndarray:
    """(pixels, 6): r, g, b, row and column in [0, 1], constant 1"""
    h, w = img.height, img.width
    rows, cols = np.meshgrid(np.arange(h) / max(h - 1, 1),
                             np.arange(w) / max(w - 1, 1), indexing='ij')
    return np.column_stack([
        img.data.reshape(-1, 3),
        rows.ravel(),
        cols.ravel(),
        np.ones(h * w),
    ])


@dataclass
class ToyModel:
    classes: tuple[str, ...]
    encoder: np.ndarray
    decoder: np.ndarray
    localizer: np.ndarray

    def __post_init__(self):
        self.classes = tuple(self.classes)
        hidden = self.encoder.shape[1] if self.encoder.ndim == 2 else -1
        if self.encoder.shape != (PIXEL_FEATURES, hidden) \
                or self.decoder.shape != (hidden, len(self.classes)) \
                or self.localizer.shape != (hidden, len(self.classes)):
            raise ToyModelError('toy model parameter shapes do not fit its classes')

    @property
    def hidden(self) -> int:
        return self.encoder.shape[1]

    def copy(self) -> ToyModel:
        return ToyModel(self.classes, self.encoder.copy(), self.decoder.copy(),
                        self.localizer.copy())

    def embed(self, phi: np.ndarray) -> np.ndarray:
        return phi @ self.encoder

    def segment(self, phi: np.ndarray) -> ScoreMap:
        return ScoreMap(self.classes, sigmoid(self.embed(phi) @ self.decoder))


def init_toy_model(classes: Sequence[str], hidden: int = 8, seed: int = 0) -> ToyModel:
    rng = np.random.default_rng(seed)
    k = len(classes)
    return ToyModel(
        tuple(classes),
        rng.normal(0.0, INIT_SCALE, (PIXEL_FEATURES, hidden)),
        rng.normal(0.0, INIT_SCALE, (hidden, k)),
        rng.normal(0.0, INIT_SCALE, (hidden, k)),
    )


def extend_model(old: ToyModel, ctx: StepContext, seed: int = 0) -> ToyModel:
    """Current-step model: old encoder and old class columns, fresh columns for new classes"""
    missing = [c for c in ctx.old_classes if c not in old.classes]
    if missing:
        raise ToyModelError(f'old model does not cover classes {missing}')
    rng = np.random.default_rng(seed)
    k = len(ctx.all_classes)
    decoder = rng.normal(0.0, INIT_SCALE, (old.hidden, k))
    localizer = rng.normal(0.0, INIT_SCALE, (old.hidden, k))
    for j, c in enumerate(ctx.all_classes):
        if c in old.classes:
            decoder[:, j] = old.decoder[:, old.classes.index(c)]
            localizer[:, j] = old.localizer[:, old.classes.index(c)]
    return ToyModel(ctx.all_classes, old.encoder.copy(), decoder, localizer)


@dataclass
class ToyModelState:
    classes: list[str]
    encoder: list[list[float]]
    decoder: list[list[float]]
    localizer: list[list[float]]


_factory = dataclass_factory.Factory()


def dump_toy_model(m: ToyModel) -> str:
    state = ToyModelState(list(m.classes), m.encoder.tolist(), m.decoder.tolist(),
                          m.localizer.tolist())
    return json.dumps(_factory.dump(state), sort_keys=True) + '\n'


def save_toy_model(m: ToyModel, path) -> None:
    Path(path).write_text(dump_toy_model(m), encoding='utf-8')


def load_toy_model(path) -> ToyModel:
    try:
        data = json.loads(Path(path).read_text(encoding='utf-8'))
        state = _factory.load(data, ToyModelState)
    except (OSError, ValueError, TypeError, KeyError) as e:
        raise ToyModelError(f'cannot load toy model {path}: {e}') from e
    return ToyModel(tuple(state.classes), np.array(state.encoder, dtype=np.float64),
                    np.array(state.decoder, dtype=np.float64),
                    np.array(state.localizer, dtype=np.float64))


@dataclass(frozen=True)
class ToySample:
    """One image with what the frozen old model said about it"""
    phi: np.ndarray
    y_prev: ScoreMap
    e_prev: FeatureMap
    # None for rehearsal images, whose labels come from y_prev
    label: MultiLabel | None = None


def make_sample(phi: np.ndarray, old: ToyModel, ctx: StepContext,
                label: MultiLabel | None = None) -> ToySample:
    y_prev = old.segment(phi).select(ctx.old_classes)
    return ToySample(phi, y_prev, FeatureMap(old.embed(phi)), label)


def cached_sample(row_id: str, phi: np.ndarray, old: ToyModel, ctx: StepContext,
                  maps_dir: Path, label: MultiLabel | None = None) -> ToySample:
    """
    Old-model maps of one image from maps_dir, computed and written there on
    the first run. Maps left by an old model of another class set or width
    are rejected.
    """
    scores_path = maps_dir / f'{row_id}.scores.wmap'
    features_path = maps_dir / f'{row_id}.features.wmap'
    if not (scores_path.exists() and features_path.exists()):
        sample = make_sample(phi, old, ctx, label)
        save_map(sample.y_prev, scores_path)
        save_map(sample.e_prev, features_path)
        return sample

    y_prev, e_prev = load_map(scores_path), load_map(features_path)
    if not isinstance(y_prev, ScoreMap) or not isinstance(e_prev, FeatureMap):
        raise MapFormatError(f'old maps of `{row_id}` are of the wrong kind')
    if y_prev.class_order != tuple(ctx.old_classes):
        raise ClassSetMismatchError(
            f'old maps of `{row_id}` cover {y_prev.class_order}, the step needs {ctx.old_classes}'
        )
    if y_prev.num_pixels != len(phi) or e_prev.num_pixels != len(phi) or e_prev.dim != old.hidden:
        raise MapFormatError(f'old maps of `{row_id}` do not fit the image or the old model')
    logger.debug('old maps of %s loaded from %s', row_id, maps_dir)
    return ToySample(phi, y_prev, e_prev, label)


def load_samples(train_rows: Sequence[TrainingRow], rehearsal_rows: Sequence[RehearsalRow],
                 old: ToyModel, ctx: StepContext, label_set: Sequence[str],
                 png_enabled: bool = True, maps_dir=None) -> list[ToySample]:
    if maps_dir is not None:
        maps_dir = Path(maps_dir)
        maps_dir.mkdir(parents=True, exist_ok=True)

    def sample(row, label=None):
        phi = pixel_features(load_image(row.file, png_enabled))
        if maps_dir is None:
            return make_sample(phi, old, ctx, label)
        return cached_sample(row.id, phi, old, ctx, maps_dir, label)

    samples = []
    for row in train_rows:
        unknown = [c for c in row.classes if c not in label_set]
        if unknown:
            raise TrainingManifestError(f'row `{row.id}` has classes {unknown} outside the step')
        samples.append(sample(row, MultiLabel.from_classes(label_set, row.classes)))
    for row in rehearsal_rows:
        samples.append(sample(row))
    return samples


@dataclass
class ToyConfig:
    epochs: int = 30
    learning_rate: float = 0.05
    warmup_epochs: int = 0
    alpha: float = 0.1
    weights: LossWeights = field(default_factory=LossWeights)

    def __post_init__(self):
        if self.epochs < 0 or self.warmup_epochs < 0:
            raise ToyModelError('epoch counts must be non-negative')
        if self.learning_rate < 0:
            raise ToyModelError('learning_rate must be non-negative')


@dataclass
class Gradients:
    encoder: np.ndarray
    decoder: np.ndarray
    localizer: np.ndarray


def sample_loss(m: ToyModel, s: ToySample, ctx: StepContext,
                cfg: ToyConfig) -> tuple[LossParts, Gradients]:
    w = cfg.weights
    e = m.embed(s.phi)
    y = sigmoid(e @ m.decoder)
    y_seg = ScoreMap(m.classes, y)
    z = ScoreMap(m.classes, e @ m.localizer, is_logits=True)
    y_img = ngwp_pool(z)

    g_y = np.zeros_like(y)
    g_z = np.zeros_like(z.scores)
    if s.label is not None:
        y_loc = smooth(pixel_probabilities(z), cfg.alpha)
        y_hat = fuse_pseudo(y_loc, s.y_prev, ctx)
        seg = loss_seg(y_hat, y_seg)
        cls = loss_cls(s.label, y_img, s.label.class_order)

        g_target, g_pred = loss_seg_grads(y_hat, y_seg)
        g_y += w.w_seg * g_pred
        g_loc = fuse_pseudo_backward(y_loc, s.y_prev, ctx, w.w_seg * g_target)
        g_z += pixel_probabilities_backward(z, smooth_backward(g_loc, cfg.alpha))
        g_img = loss_cls_grad(s.label, y_img, s.label.class_order)
    else:
        old = s.y_prev.class_order
        idx = y_seg.column_index(old)
        seg = loss_seg(s.y_prev, y_seg.select(old))
        label = image_label_from_pixel(s.y_prev)
        cls = loss_cls(label, y_img, old)

        g_y[:, idx] += w.w_seg * loss_seg_grads(s.y_prev, y_seg.select(old))[1]
        g_img = loss_cls_grad(label, y_img, old)
    g_z += ngwp_pool_backward(z, w.w_cls * g_img)

    e_t = FeatureMap(e)
    kde = loss_kde(e_t, s.e_prev)
    kdl = loss_kdl(z, s.y_prev, ctx.old_classes)
    g_z += w.w_kdl * loss_kdl_grad(z, s.y_prev, ctx.old_classes)

    g_s = g_y * y * (1.0 - y)
    g_e = g_s @ m.decoder.T + g_z @ m.localizer.T + w.w_kde * loss_kde_grad(e_t, s.e_prev)
    return LossParts(seg, cls, kde, kdl), Gradients(s.phi.T @ g_e, e.T @ g_s, e.T @ g_z)


def dataset_loss(m: ToyModel, samples: Sequence[ToySample], ctx: StepContext,
                 cfg: ToyConfig) -> tuple[float, LossParts, Gradients]:
    """Mean total loss, mean parts and mean gradients over the samples"""
    if m.classes != ctx.all_classes:
        raise ToyModelError(
            f'model classes {m.classes} differ from the step classes {ctx.all_classes}'
        )
    if not samples:
        raise TrainingManifestError('nothing to train on')
    parts, grads = zip(*(sample_loss(m, s, ctx, cfg) for s in samples))
    n = len(samples)
    mean_parts = LossParts(*(sum(getattr(p, name) for p in parts) / n
                             for name in ('seg', 'cls', 'kde', 'kdl')))
    mean_grads = Gradients(
        sum(g.encoder for g in grads) / n,
        sum(g.decoder for g in grads) / n,
        sum(g.localizer for g in grads) / n,
    )
    return total_loss(mean_parts, cfg.weights), mean_parts, mean_grads


def _epoch_loss(model: ToyModel, samples: Sequence[ToySample], ctx: StepContext,
                cfg: ToyConfig, epoch: int) -> tuple[float, LossParts, Gradients]:
    """dataset_loss, with non-finite parameters or scores reported as divergence"""
    for name in ('encoder', 'decoder', 'localizer'):
        if not np.all(np.isfinite(getattr(model, name))):
            raise ToyDivergenceError(epoch, f'non-finite {name} weights')
    try:
        with np.errstate(over='ignore', invalid='ignore'):
            loss, parts, grads = dataset_loss(model, samples, ctx, cfg)
    except NonFiniteLossError as e:
        raise ToyDivergenceError(epoch, str(e)) from e
    except InvalidMapError as e:
        # the input maps were checked before the first update
        if epoch == 0:
            raise
        raise ToyDivergenceError(epoch, str(e)) from e
    if not np.isfinite(loss):
        raise ToyDivergenceError(epoch, f'total loss {loss}')
    return loss, parts, grads


def train_toy(m: ToyModel, samples: Sequence[ToySample], ctx: StepContext,
              cfg: ToyConfig) -> tuple[ToyModel, TrainingSummary]:
    """
    losses[0] is the loss of the input model; one gradient step per epoch.
    During warm-up only the localizer head moves.
    """
    model = m.copy()
    loss, parts, grads = _epoch_loss(model, samples, ctx, cfg, 0)
    losses = [loss]
    for epoch in range(1, cfg.epochs + 1):
        with np.errstate(over='ignore', invalid='ignore'):
            model.localizer -= cfg.learning_rate * grads.localizer
            if epoch > cfg.warmup_epochs:
                model.encoder -= cfg.learning_rate * grads.encoder
                model.decoder -= cfg.learning_rate * grads.decoder
        loss, parts, grads = _epoch_loss(model, samples, ctx, cfg, epoch)
        losses.append(loss)
        logger.debug('toy epoch %d: loss %.6f', epoch, loss)
    logger.info('toy step: loss %.6f -> %.6f over %d epochs', losses[0], losses[-1], cfg.epochs)

    summary = TrainingSummary(
        train_images=sum(1 for s in samples if s.label is not None),
        rehearsal_images=sum(1 for s in samples if s.label is None),
        epochs=cfg.epochs,
        warmup_epochs=cfg.warmup_epochs,
        learning_rate=cfg.learning_rate,
        weights=asdict(cfg.weights),
        losses=losses,
        final_parts=asdict(parts),
    )
    return model, summary
