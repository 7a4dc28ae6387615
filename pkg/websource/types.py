from __future__ import annotations

from dataclasses import dataclass, field

from lexicon.types import Caption
from websource.exceptions import InvalidBudgetError


@dataclass(frozen=True)
class WebRecord:
    """
    One image reachable through a backend. classes holds ground-truth tags
    for step-0 records and the memory tags a rehearsal record was found by.
    """
    source_id: str
    image_ref: str
    queried_with: str = ''
    caption: Caption | None = None
    keywords: tuple[str, ...] = ()
    classes: tuple[str, ...] = ()


@dataclass(frozen=True)
class CrawlBudget:
    per_class_crawl: int = 10000
    per_class_keep: int = 500
    per_caption: int = 20
    rehearsal_per_class: int = 100

    def __post_init__(self):
        for name in ('per_class_crawl', 'per_class_keep',
                     'per_caption', 'rehearsal_per_class'):
            if getattr(self, name) < 1:
                raise InvalidBudgetError(f'{name} must be positive')
        if self.per_class_keep > self.per_class_crawl:
            raise InvalidBudgetError('per_class_keep cannot exceed per_class_crawl')


@dataclass(frozen=True)
class MemoryEntry:
    classes: tuple[str, ...]
    caption: str


@dataclass
class CaptionMemory:
    """Step-0 captions and their class tags; never any pixel data"""
    entries: list[MemoryEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class QueryFailure:
    caption: str
    error: str


@dataclass
class RehearsalQueryResult:
    records: list[WebRecord] = field(default_factory=list)
    failures: list[QueryFailure] = field(default_factory=list)
