from __future__ import annotations

from dataclasses import dataclass, field

from django.db import models

from semfilter.types import FilterConfig
from websource.types import CrawlBudget
from wilss.types import BACKGROUND, StepContext


class TrainSource(models.TextChoices):
    DATASET = 'dataset'
    WEB = 'web'


class RehearsalMode(models.TextChoices):
    NONE = 'none'
    WEB = 'web'


class Labeling(models.TextChoices):
    CAPTION = 'caption'
    NAIVE = 'naive'


class RehearsalQuery(models.TextChoices):
    CAPTION = 'caption'
    CLASS_NAME = 'class_name'


@dataclass(frozen=True)
class StepPlan:
    """
    One incremental step. old_classes are the object classes learnt so
    far; background is implied and never listed.
    """
    protocol: str
    step: int
    old_classes: tuple[str, ...]
    new_classes: tuple[str, ...]
    overlapped: bool = False
    train_source: str = TrainSource.WEB
    rehearsal: str = RehearsalMode.WEB
    seed: int = 0

    per_class_crawl: int = 10000
    per_class_keep: int = 500
    per_caption: int = 20
    rehearsal_per_class: int = 100
    threshold: float = 0.6
    # None means every noun of a caption
    noun_count: int | None = 2

    use_discriminator: bool = True
    labeling: str = Labeling.CAPTION
    rehearsal_query: str = RehearsalQuery.CAPTION
    use_filter: bool = True

    @property
    def budget(self) -> CrawlBudget:
        return CrawlBudget(self.per_class_crawl, self.per_class_keep,
                           self.per_caption, self.rehearsal_per_class)

    @property
    def filter_config(self) -> FilterConfig:
        return FilterConfig(self.threshold, self.noun_count)

    @property
    def label_set(self) -> tuple[str, ...]:
        """Object classes of Y^t, the range of crawled image labels"""
        return self.old_classes + self.new_classes

    @property
    def context(self) -> StepContext:
        return StepContext((BACKGROUND,) + self.old_classes, self.new_classes)


@dataclass(frozen=True)
class TrainingRow:
    """One line of an acquisition manifest"""
    id: str
    file: str
    queried_with: str
    classes: tuple[str, ...]
    label: tuple[int, ...]
    score: float
    caption: str | None = None


@dataclass(frozen=True)
class RehearsalRow:
    """One line of a rehearsal manifest; classes are the memory tags"""
    id: str
    file: str
    queried_with: str
    classes: tuple[str, ...]
    caption: str | None = None
    similarity: float | None = None


@dataclass
class Funnel:
    """Per-query counts; each stage only ever drops records"""
    crawled: int = 0
    gated: int = 0
    labeled: int = 0
    kept: int = 0
    failed: int = 0

    def is_monotone(self) -> bool:
        return self.crawled >= self.gated >= self.labeled >= self.kept


@dataclass
class RehearsalFunnel:
    retrieved: int = 0
    captioned: int = 0
    filtered: int = 0
    kept: int = 0
    failed_queries: int = 0

    def is_monotone(self) -> bool:
        return self.retrieved >= self.captioned >= self.filtered >= self.kept


@dataclass
class AcquisitionResult:
    rows: list[TrainingRow] = field(default_factory=list)
    funnels: dict[str, Funnel] = field(default_factory=dict)


@dataclass
class RehearsalResult:
    rows: list[RehearsalRow] = field(default_factory=list)
    funnel: RehearsalFunnel = field(default_factory=RehearsalFunnel)
    per_class: dict[str, int] = field(default_factory=dict)


@dataclass
class TrainingSummary:
    train_images: int = 0
    rehearsal_images: int = 0
    epochs: int = 0
    warmup_epochs: int = 0
    learning_rate: float = 0.0
    weights: dict[str, float] = field(default_factory=dict)
    # losses[0] is the loss before the first update
    losses: list[float] = field(default_factory=list)
    final_parts: dict[str, float] = field(default_factory=dict)


@dataclass
class StepReport:
    protocol: str
    step: int
    config: dict = field(default_factory=dict)
    acquisition: dict[str, Funnel] | None = None
    rehearsal: RehearsalFunnel | None = None
    training: TrainingSummary | None = None
    wall_time: dict[str, float] | None = None
