"""Discriminator training over manifest images, with an optional holdout."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from discriminator.checkpoints import FeatureSpec
from discriminator.exceptions import EmptyClassError
from discriminator.mlp import evaluate, init_model, train
from discriminator.types import MlpModel, TrainConfig, TrainingHistory
from imaging.types import SpectrumFeature
from pipeline.acquisition import record_features
from webwilss.exceptions import ConfigurationError
from websource.types import WebRecord


logger = logging.getLogger(__name__)


@dataclass
class DiscriminatorRun:
    model: MlpModel
    history: TrainingHistory
    train_sizes: tuple[int, int]
    holdout_sizes: tuple[int, int] = (0, 0)
    holdout_accuracy: float | None = None


def split_holdout(items: Sequence, fraction: float, seed: int) -> tuple[list, list]:
    """(train, holdout), holdout drawn by a seeded permutation"""
    if not 0 <= fraction < 1:
        raise ConfigurationError(f'holdout fraction must lie in [0, 1), got {fraction}')
    n_holdout = int(round(fraction * len(items)))
    order = np.random.default_rng(seed).permutation(len(items))
    holdout = set(order[:n_holdout].tolist())
    train_part = [item for i, item in enumerate(items) if i not in holdout]
    holdout_part = [item for i, item in enumerate(items) if i in holdout]
    return train_part, holdout_part


def train_on_features(positives: Sequence[SpectrumFeature], negatives: Sequence[SpectrumFeature],
                      hidden_dims: Sequence[int], cfg: TrainConfig,
                      holdout_fraction: float = 0.0) -> DiscriminatorRun:
    if not positives or not negatives:
        raise EmptyClassError('both dataset and web images are needed')
    pos_train, pos_holdout = split_holdout(positives, holdout_fraction, cfg.seed)
    neg_train, neg_holdout = split_holdout(negatives, holdout_fraction, cfg.seed + 1)
    dims = [len(positives[0])] + list(hidden_dims) + [2]
    model, history = train(init_model(dims, cfg.seed), pos_train, neg_train, cfg)
    run = DiscriminatorRun(model, history, (len(pos_train), len(neg_train)),
                           (len(pos_holdout), len(neg_holdout)))
    if pos_holdout or neg_holdout:
        run.holdout_accuracy = evaluate(model, pos_holdout, neg_holdout)
        logger.info('holdout accuracy %.4f on %d images', run.holdout_accuracy,
                    len(pos_holdout) + len(neg_holdout))
    return run


def train_discriminator(dataset_records: Sequence[WebRecord],
                        web_records: Sequence[WebRecord], spec: FeatureSpec,
                        hidden_dims: Sequence[int], cfg: TrainConfig,
                        holdout_fraction: float = 0.0, png_enabled: bool = True,
                        workers: int = 1) -> DiscriminatorRun:
    """Load, transform and train: dataset images are positives, web images negatives"""
    if not dataset_records or not web_records:
        raise EmptyClassError('both dataset and web manifests must list images')
    positives = [f for f in record_features(dataset_records, spec, png_enabled, workers)
                 if f is not None]
    negatives = [f for f in record_features(web_records, spec, png_enabled, workers)
                 if f is not None]
    return train_on_features(positives, negatives, hidden_dims, cfg, holdout_fraction)
