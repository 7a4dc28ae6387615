"""
Reader for the WordNet database (WNdb) noun files and the hypernym
queries behind depth descriptors.

data.noun:  offset lex_filenum ss_type w_cnt(hex) [word lex_id]... p_cnt
            [pointer_symbol offset pos source/target]... | gloss
index.noun: lemma pos synset_cnt p_cnt [pointer_symbol]... sense_cnt
            tagsense_cnt [offset]...

Lines starting with a space are license text. Both `@` and `@i` count
as hypernym pointers.
"""
from __future__ import annotations

import logging
from collections import deque
from pathlib import Path

import numpy as np

from semfilter.exceptions import HypernymCycleError, UnknownLemmaError, WordnetParseError
from semfilter.types import DepthDescriptor, WordnetGraph


logger = logging.getLogger(__name__)

MINI_WORDNET = Path(__file__).resolve().parent / 'data' / 'mini_wordnet'

HYPERNYM_POINTERS = ('@', '@i')

IRREGULAR_NOUNS = {
    'men': 'man',
    'women': 'woman',
    'people': 'person',
    'children': 'child',
    'mice': 'mouse',
    'geese': 'goose',
    'feet': 'foot',
    'teeth': 'tooth',
    'sheep': 'sheep',
}


def _content_lines(path):
    try:
        with open(path, encoding='utf-8') as f:
            for lineno, line in enumerate(f, start=1):
                if line.startswith(' ') or not line.strip():
                    continue
                yield lineno, line.rstrip('\n')
    except OSError as e:
        raise WordnetParseError(f'cannot read: {e}', path) from e


def parse_data_file(path):
    synsets: dict[str, frozenset[str]] = {}
    hypernyms: dict[str, frozenset[str]] = {}
    for lineno, line in _content_lines(path):
        fields = line.split(' | ', 1)[0].split()
        try:
            offset, ss_type = fields[0], fields[2]
            w_cnt = int(fields[3], 16)
            pos = 4
            words = []
            for _ in range(w_cnt):
                words.append(fields[pos].lower())
                pos += 2
            p_cnt = int(fields[pos])
            pos += 1
            parents = set()
            for _ in range(p_cnt):
                symbol, target, target_pos = fields[pos:pos + 3]
                if len(fields) < pos + 4:
                    raise IndexError
                if symbol in HYPERNYM_POINTERS and target_pos == 'n':
                    parents.add(target)
                pos += 4
        except (IndexError, ValueError):
            raise WordnetParseError('malformed synset record', path, lineno)
        if ss_type != 'n':
            raise WordnetParseError(f'not a noun synset (`{ss_type}`)', path, lineno)
        if not offset.isdigit() or len(offset) != 8:
            raise WordnetParseError(f'bad synset offset `{offset}`', path, lineno)
        if offset in synsets:
            raise WordnetParseError(f'synset {offset} is defined twice', path, lineno)
        if not words:
            raise WordnetParseError(f'synset {offset} has no words', path, lineno)
        synsets[offset] = frozenset(words)
        hypernyms[offset] = frozenset(parents)
    return synsets, hypernyms


def parse_index_file(path):
    lemma_index: dict[str, tuple[str, ...]] = {}
    lines: dict[str, int] = {}
    for lineno, line in _content_lines(path):
        fields = line.split()
        try:
            lemma, pos = fields[0].lower(), fields[1]
            synset_cnt = int(fields[2])
            p_cnt = int(fields[3])
            offsets = fields[4 + p_cnt + 2:]
        except (IndexError, ValueError):
            raise WordnetParseError('malformed index record', path, lineno)
        if pos != 'n':
            continue
        if len(offsets) != synset_cnt:
            raise WordnetParseError(
                f'`{lemma}` lists {len(offsets)} synsets, declares {synset_cnt}',
                path, lineno,
            )
        lemma_index[lemma] = tuple(offsets)
        lines[lemma] = lineno
    return lemma_index, lines


def load_wordnet(index_path=MINI_WORDNET / 'index.noun',
                 data_path=MINI_WORDNET / 'data.noun') -> WordnetGraph:
    synsets, hypernyms = parse_data_file(data_path)
    lemma_index, lines = parse_index_file(index_path)

    for lemma, offsets in lemma_index.items():
        for offset in offsets:
            if offset not in synsets:
                raise WordnetParseError(
                    f'`{lemma}` points at unknown synset {offset}',
                    index_path, lines[lemma],
                )
    for offset, parents in hypernyms.items():
        missing = parents - synsets.keys()
        if missing:
            raise WordnetParseError(
                f'synset {offset} has unknown hypernyms {sorted(missing)}', data_path
            )

    _check_acyclic(hypernyms)
    depths = _root_depths(hypernyms)
    graph = WordnetGraph(
        synsets=synsets,
        hypernyms=hypernyms,
        lemma_index=lemma_index,
        depths=depths,
        max_depth=max(depths.values(), default=0),
    )
    logger.info('loaded %d noun synsets, %d lemmas, max depth %d',
                len(synsets), len(lemma_index), graph.max_depth)
    return graph


def _children(hypernyms) -> dict[str, list[str]]:
    children = {offset: [] for offset in hypernyms}
    for offset in sorted(hypernyms):
        for parent in hypernyms[offset]:
            children[parent].append(offset)
    return children


def _check_acyclic(hypernyms) -> None:
    """Kahn's algorithm over child -> parent edges"""
    pending = {offset: len(parents) for offset, parents in hypernyms.items()}
    children = _children(hypernyms)
    queue = deque(offset for offset, n in pending.items() if n == 0)
    visited = 0
    while queue:
        offset = queue.popleft()
        visited += 1
        for child in children[offset]:
            pending[child] -= 1
            if pending[child] == 0:
                queue.append(child)
    if visited != len(hypernyms):
        stuck = sorted(o for o, n in pending.items() if n > 0)
        raise HypernymCycleError(f'hypernym cycle through synsets {stuck[:5]}')


def _root_depths(hypernyms) -> dict[str, int]:
    children = _children(hypernyms)
    depths = {offset: 0 for offset, parents in hypernyms.items() if not parents}
    queue = deque(sorted(depths))
    while queue:
        offset = queue.popleft()
        for child in children[offset]:
            if child not in depths:
                depths[child] = depths[offset] + 1
                queue.append(child)
    return depths


def lemmatize(word: str, g: WordnetGraph) -> str:
    word = word.lower()
    if word in IRREGULAR_NOUNS:
        return IRREGULAR_NOUNS[word]
    for suffix in ('es', 's'):
        if word.endswith(suffix) and word[:-len(suffix)] in g:
            return word[:-len(suffix)]
    return word


def hypernym_closure(g: WordnetGraph, noun: str) -> frozenset[tuple[str, int]]:
    """Every ancestor of every sense of the noun, senses included, with depth"""
    noun = noun.lower()
    if noun not in g:
        raise UnknownLemmaError(f'`{noun}` is not an indexed noun')
    seen = set()
    stack = list(g.lemma_index[noun])
    while stack:
        offset = stack.pop()
        if offset in seen:
            continue
        seen.add(offset)
        stack.extend(g.hypernyms[offset])
    return frozenset((offset, g.depths[offset]) for offset in seen)


def descriptor(g: WordnetGraph, noun: str) -> DepthDescriptor:
    values = np.zeros(g.max_depth + 1, dtype=np.int64)
    for _, depth in hypernym_closure(g, noun):
        values[depth] += 1
    return DepthDescriptor(values)
