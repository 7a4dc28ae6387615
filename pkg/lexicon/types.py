from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from django.db import models

from lexicon.exceptions import InvalidLabelError, UnknownClassError


class CaptionSource(models.TextChoices):
    PROVIDER = 'provider', 'caption provider'
    STORED = 'stored', 'caption memory'
    REGENERATED = 'regenerated', 'regenerated by the provider'


@dataclass(frozen=True)
class Caption:
    text: str
    source: str = CaptionSource.PROVIDER


@dataclass(frozen=True)
class ClassLexicon:
    """
    Surface forms per class. Forms are lowercase, space-joined token
    sequences; form_index maps every form back to its single class.
    """
    classes: tuple[str, ...]
    words: Mapping[str, frozenset[str]]
    form_index: Mapping[str, str] = field(repr=False)

    @property
    def max_phrase_len(self) -> int:
        return max((len(f.split()) for f in self.form_index), default=1)

    def class_of(self, form: str) -> str | None:
        return self.form_index.get(form)


@dataclass(frozen=True)
class MultiLabel:
    class_order: tuple[str, ...]
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != len(self.class_order):
            raise InvalidLabelError(
                f'{len(self.bits)} bits for {len(self.class_order)} classes'
            )
        if any(b not in (0, 1) for b in self.bits):
            raise InvalidLabelError(f'label bits must be 0 or 1, got {self.bits}')

    @classmethod
    def from_classes(cls, class_order, positives) -> MultiLabel:
        positives = set(positives)
        return cls(tuple(class_order),
                   tuple(int(c in positives) for c in class_order))

    def bit(self, class_name: str) -> int:
        try:
            return self.bits[self.class_order.index(class_name)]
        except ValueError:
            raise UnknownClassError(f'class `{class_name}` is not in the label set')

    @property
    def positives(self) -> list[str]:
        return [c for c, b in zip(self.class_order, self.bits) if b]

    @property
    def is_empty(self) -> bool:
        return not any(self.bits)
