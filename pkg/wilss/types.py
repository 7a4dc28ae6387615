from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np

from wilss.exceptions import (
    ClassSetMismatchError,
    InvalidMapError,
    InvalidWeightsError,
    NonFiniteLossError,
)


BACKGROUND = 'background'


@dataclass(frozen=True)
class ScoreMap:
    """
    Per-pixel class scores, one row per pixel. Probabilities unless
    is_logits is set, in which case entries are unbounded.
    """
    class_order: tuple[str, ...]
    scores: np.ndarray
    is_logits: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'class_order', tuple(self.class_order))
        if self.scores.ndim != 2 or self.scores.shape[1] != len(self.class_order):
            raise InvalidMapError(
                f'scores {self.scores.shape} do not fit {len(self.class_order)} classes'
            )
        if len(set(self.class_order)) != len(self.class_order):
            raise InvalidMapError(f'repeated classes in {self.class_order}')
        if not np.all(np.isfinite(self.scores)):
            raise InvalidMapError('scores must be finite')
        if not self.is_logits and self.scores.size \
                and (self.scores.min() < 0 or self.scores.max() > 1):
            raise InvalidMapError('probability scores must lie in [0, 1]')

    @property
    def num_pixels(self) -> int:
        return self.scores.shape[0]

    def column_index(self, classes: Sequence[str]) -> list[int]:
        try:
            return [self.class_order.index(c) for c in classes]
        except ValueError:
            missing = [c for c in classes if c not in self.class_order]
            raise ClassSetMismatchError(
                f'classes {missing} are not covered by {self.class_order}'
            )

    def select(self, classes: Sequence[str]) -> ScoreMap:
        return ScoreMap(tuple(classes), self.scores[:, self.column_index(classes)],
                        self.is_logits)


@dataclass(frozen=True)
class FeatureMap:
    vectors: np.ndarray

    def __post_init__(self):
        if self.vectors.ndim != 2:
            raise InvalidMapError(f'expected (pixels, dim) vectors, got {self.vectors.shape}')
        if not np.all(np.isfinite(self.vectors)):
            raise InvalidMapError('feature vectors must be finite')

    @property
    def num_pixels(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class ImageScores:
    """Image-level scores, one per class"""
    class_order: tuple[str, ...]
    values: np.ndarray

    def of(self, classes: Sequence[str]) -> np.ndarray:
        try:
            return self.values[[self.class_order.index(c) for c in classes]]
        except ValueError:
            raise ClassSetMismatchError(f'{classes} not all in {self.class_order}')


@dataclass(frozen=True)
class StepContext:
    """Y^t is old_classes (background included) followed by new_classes"""
    old_classes: tuple[str, ...]
    new_classes: tuple[str, ...]
    background: str = BACKGROUND

    def __post_init__(self):
        object.__setattr__(self, 'old_classes', tuple(self.old_classes))
        object.__setattr__(self, 'new_classes', tuple(self.new_classes))
        if self.background not in self.old_classes:
            raise ClassSetMismatchError(
                f'background `{self.background}` must be an old class'
            )
        overlap = set(self.old_classes) & set(self.new_classes)
        if overlap:
            raise ClassSetMismatchError(f'classes {sorted(overlap)} are both old and new')
        if not self.new_classes:
            raise ClassSetMismatchError('a step needs at least one new class')

    @property
    def all_classes(self) -> tuple[str, ...]:
        return self.old_classes + self.new_classes


@dataclass(frozen=True)
class LossWeights:
    w_seg: float = 1.0
    w_cls: float = 1.0
    w_kde: float = 1.0
    w_kdl: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise InvalidWeightsError(f'{f.name} must be non-negative')

    @classmethod
    def web_rehearsal(cls) -> LossWeights:
        return cls(w_kde=0.5)


@dataclass(frozen=True)
class LossParts:
    seg: float = 0.0
    cls: float = 0.0
    kde: float = 0.0
    kdl: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            if not np.isfinite(getattr(self, f.name)):
                raise NonFiniteLossError(f'{f.name} loss is not finite')
