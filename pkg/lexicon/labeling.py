from __future__ import annotations

import logging
from typing import Sequence

from lexicon.exceptions import UnknownClassError
from lexicon.text import split_words
from lexicon.types import Caption, ClassLexicon, MultiLabel


logger = logging.getLogger(__name__)


def tokenize_caption(c: Caption, lexicon: ClassLexicon) -> dict[str, str]:
    """
    Matched surface forms of a caption, each mapped to its class, in order
    of first appearance. At every position the longest lexicon phrase wins
    and its tokens are consumed.
    """
    tokens = split_words(c.text)
    longest = lexicon.max_phrase_len
    matches: dict[str, str] = {}
    i = 0
    while i < len(tokens):
        for span in range(min(longest, len(tokens) - i), 0, -1):
            form = ' '.join(tokens[i:i + span])
            class_name = lexicon.class_of(form)
            if class_name is not None:
                matches.setdefault(form, class_name)
                i += span
                break
        else:
            i += 1
    return matches


def _check_label_set(label_set: Sequence[str], known) -> tuple[str, ...]:
    unknown = [c for c in label_set if c not in known]
    if unknown:
        raise UnknownClassError(f'unknown classes {unknown}')
    return tuple(label_set)


def derive_label(c: Caption, lexicon: ClassLexicon,
                 label_set: Sequence[str]) -> MultiLabel:
    """Bit c is set iff some form of class c occurs in the caption"""
    label_set = _check_label_set(label_set, lexicon.classes)
    found = set(tokenize_caption(c, lexicon).values())
    return MultiLabel.from_classes(label_set, found)


def naive_label(queried_class: str, label_set: Sequence[str]) -> MultiLabel:
    if queried_class not in label_set:
        raise UnknownClassError(f'class `{queried_class}` is not in the label set')
    return MultiLabel.from_classes(label_set, [queried_class])


def should_discard(label: MultiLabel, queried_class: str) -> bool:
    return label.bit(queried_class) == 0
