from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from django.db import models

from semfilter.exceptions import InvalidFilterConfigError


# noun_count value meaning "every noun in the caption"
ALL = None


@dataclass(frozen=True)
class WordnetGraph:
    """
    Noun synsets keyed by their offset. depths holds the minimum distance
    of every synset from any root; max_depth is the largest of them.
    """
    synsets: Mapping[str, frozenset[str]]
    hypernyms: Mapping[str, frozenset[str]]
    lemma_index: Mapping[str, tuple[str, ...]]
    depths: Mapping[str, int] = field(repr=False)
    max_depth: int = 0

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.lemma_index


@dataclass(frozen=True)
class DepthDescriptor:
    values: np.ndarray

    def __post_init__(self):
        if self.values.ndim != 1 or np.any(self.values < 0):
            raise ValueError('descriptor must be a non-negative vector')

    def __len__(self) -> int:
        return len(self.values)

    @property
    def total(self) -> int:
        return int(self.values.sum())


@dataclass(frozen=True)
class FilterConfig:
    threshold: float = 0.6
    noun_count: int | None = 2

    def __post_init__(self):
        if not 0 <= self.threshold <= 1:
            raise InvalidFilterConfigError(
                f'threshold must lie in [0, 1], got {self.threshold}'
            )
        if self.noun_count is not ALL and self.noun_count < 1:
            raise InvalidFilterConfigError(
                f'noun_count must be at least 1 or ALL, got {self.noun_count}'
            )


class RejectReason(models.TextChoices):
    NO_NOUNS = 'no nouns', 'a caption has no indexed nouns'
    BELOW_THRESHOLD = 'below threshold', 'no noun pair is similar enough'


@dataclass(frozen=True)
class FilterDecision:
    kept: bool
    best_pair: tuple[str, str] | None
    best_similarity: float
    nouns_q1: tuple[str, ...]
    nouns_q2: tuple[str, ...]
    reason: str | None = None
