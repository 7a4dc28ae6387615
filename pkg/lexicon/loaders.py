"""
Lexicon files hold one class per record:

    class name: form, other form, multiword form

`#` starts a comment and blank lines are ignored. The class name is
always one of its own forms.
"""
from __future__ import annotations

import logging
from pathlib import Path

from lexicon.exceptions import (
    DuplicateFormError,
    EmptyWordSetError,
    LexiconParseError,
)
from lexicon.text import normalize_form
from lexicon.types import ClassLexicon


logger = logging.getLogger(__name__)

VOC_LEXICON = Path(__file__).resolve().parent / 'data' / 'voc.lexicon'

IRREGULAR_PLURALS = {
    'man': 'men',
    'woman': 'women',
    'person': 'people',
    'sheep': 'sheep',
    'child': 'children',
    'mouse': 'mice',
}
SIBILANT_ENDINGS = ('s', 'x', 'z', 'ch', 'sh')
VOWELS = 'aeiou'


def pluralize(form: str) -> str | None:
    """Plural of the last word of a form; None when it already is one"""
    *head, last = form.split()
    if last in IRREGULAR_PLURALS.values() and last not in IRREGULAR_PLURALS:
        return None
    if last in IRREGULAR_PLURALS:
        plural = IRREGULAR_PLURALS[last]
    elif last.endswith(SIBILANT_ENDINGS):
        plural = last + 'es'
    elif len(last) > 1 and last.endswith('y') and last[-2] not in VOWELS:
        plural = last[:-1] + 'ies'
    else:
        plural = last + 's'
    return ' '.join(head + [plural])


def parse_lexicon(text: str, expand_plurals: bool = True) -> ClassLexicon:
    classes: list[str] = []
    explicit: dict[str, list[str]] = {}
    owner: dict[str, str] = {}

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split('#', 1)[0].strip()
        if not line:
            continue
        if ':' not in line:
            raise LexiconParseError('expected `class: form, form, ...`', lineno)
        raw_name, raw_forms = line.split(':', 1)
        name = normalize_form(raw_name)
        forms = [normalize_form(f) for f in raw_forms.split(',')]
        forms = [f for f in forms if f]
        if not name:
            if not forms:
                raise EmptyWordSetError(f'line {lineno}: record has no words at all')
            raise LexiconParseError('missing class name', lineno)
        if name in explicit:
            raise DuplicateFormError(f'line {lineno}: class `{name}` is declared twice')

        classes.append(name)
        explicit[name] = []
        for form in [name] + forms:
            if form in owner and owner[form] != name:
                raise DuplicateFormError(
                    f'line {lineno}: `{form}` belongs to both '
                    f'`{owner[form]}` and `{name}`'
                )
            if form not in owner:
                owner[form] = name
                explicit[name].append(form)

    if not classes:
        raise LexiconParseError('lexicon defines no classes')

    if expand_plurals:
        for name in classes:
            for form in list(explicit[name]):
                plural = pluralize(form)
                if plural is None or plural in owner:
                    if plural is not None and owner[plural] != name:
                        logger.debug('plural `%s` of `%s` already belongs to `%s`',
                                     plural, form, owner[plural])
                    continue
                owner[plural] = name

    words = {name: frozenset(f for f, c in owner.items() if c == name)
             for name in classes}
    return ClassLexicon(tuple(classes), words, dict(owner))


def load_lexicon(path=VOC_LEXICON, expand_plurals: bool = True) -> ClassLexicon:
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise LexiconParseError(f'cannot read lexicon {path}: {e}') from e
    lexicon = parse_lexicon(text, expand_plurals)
    logger.debug('loaded %d classes, %d forms from %s',
                 len(lexicon.classes), len(lexicon.form_index), path)
    return lexicon
