from __future__ import annotations

import logging
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from lexicon.text import split_words
from lexicon.types import Caption
from semfilter.exceptions import WordnetParseError
from semfilter.types import (
    ALL,
    DepthDescriptor,
    FilterConfig,
    FilterDecision,
    RejectReason,
    WordnetGraph,
)
from semfilter.wordnet import descriptor, lemmatize


logger = logging.getLogger(__name__)

STOPWORDS = Path(__file__).resolve().parent / 'data' / 'stopwords.txt'

NounExtractor = Callable[..., list[str]]


@lru_cache(maxsize=8)
def load_stopwords(path=STOPWORDS) -> frozenset[str]:
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise WordnetParseError(f'cannot read stopword list: {e}', path) from e
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def extract_nouns(c: Caption, g: WordnetGraph, n: int | None = 2,
                  stopwords: Iterable[str] | None = None) -> list[str]:
    """
    Indexed noun lemmas in caption order, each kept once. A token counts
    as a noun when its lemma is in the graph and neither it nor its lemma
    is a stopword. n=ALL returns every noun.
    """
    stopwords = load_stopwords() if stopwords is None else frozenset(stopwords)
    nouns: list[str] = []
    for token in split_words(c.text):
        if token in stopwords:
            continue
        lemma = lemmatize(token, g)
        if lemma in g and lemma not in stopwords and lemma not in nouns:
            nouns.append(lemma)
            if n is not ALL and len(nouns) == n:
                break
    return nouns


def cosine_similarity(a: DepthDescriptor, b: DepthDescriptor) -> float:
    size = max(len(a), len(b))
    u = np.zeros(size)
    v = np.zeros(size)
    u[:len(a)] = a.values
    v[:len(b)] = b.values
    # sqrt of the product keeps self-similarity at exactly 1 for count vectors
    norms = np.sqrt(np.dot(u, u) * np.dot(v, v))
    if norms == 0:
        return 0.0
    return float(min(1.0, np.dot(u, v) / norms))


def filter_pair(q1: Caption, q2: Caption, g: WordnetGraph,
                cfg: FilterConfig = FilterConfig(),
                stopwords: Iterable[str] | None = None,
                extractor: NounExtractor = extract_nouns) -> FilterDecision:
    """
    Keep the pair when some noun of q1 and some noun of q2 have depth
    descriptors with cosine similarity at least cfg.threshold.
    The first best pair in caption order is reported.
    """
    nouns_q1 = tuple(extractor(q1, g, cfg.noun_count, stopwords))
    nouns_q2 = tuple(extractor(q2, g, cfg.noun_count, stopwords))
    if not nouns_q1 or not nouns_q2:
        logger.debug('filter reject (%s): %r / %r', RejectReason.NO_NOUNS,
                     q1.text, q2.text)
        return FilterDecision(False, None, 0.0, nouns_q1, nouns_q2,
                              RejectReason.NO_NOUNS)

    descriptors = {noun: descriptor(g, noun) for noun in set(nouns_q1 + nouns_q2)}
    best_pair, best = None, -1.0
    for a in nouns_q1:
        for b in nouns_q2:
            similarity = cosine_similarity(descriptors[a], descriptors[b])
            if similarity > best:
                best_pair, best = (a, b), similarity

    kept = best >= cfg.threshold
    if not kept:
        logger.debug('filter reject (%s): best %s %.4f < %.4f',
                     RejectReason.BELOW_THRESHOLD, best_pair, best, cfg.threshold)
    return FilterDecision(kept, best_pair, best, nouns_q1, nouns_q2,
                          None if kept else RejectReason.BELOW_THRESHOLD)
