"""
Noun extraction through NLTK's Penn Treebank tagger. Needs the
`averaged_perceptron_tagger_eng` and `punkt_tab` data packages.
"""
from __future__ import annotations

import logging
from typing import Iterable

from lexicon.types import Caption
from semfilter.exceptions import TaggerUnavailableError
from semfilter.filtering import load_stopwords
from semfilter.types import ALL, WordnetGraph
from semfilter.wordnet import lemmatize


logger = logging.getLogger(__name__)

NOUN_TAGS = ('NN', 'NNS', 'NNP', 'NNPS')


class PosTagNounExtractor:
    """Drop-in for extract_nouns: tagged nouns that the graph indexes"""

    def __init__(self):
        try:
            import nltk
            nltk.pos_tag(['probe'])
            nltk.word_tokenize('probe')
        except (ImportError, LookupError) as e:
            raise TaggerUnavailableError(f'NLTK tagger is not available: {e}') from e
        self._nltk = nltk

    def __call__(self, c: Caption, g: WordnetGraph, n: int | None = 2,
                 stopwords: Iterable[str] | None = None) -> list[str]:
        stopwords = load_stopwords() if stopwords is None else frozenset(stopwords)
        tokens = self._nltk.word_tokenize(c.text.lower())
        nouns: list[str] = []
        for word, tag in self._nltk.pos_tag(tokens):
            if tag not in NOUN_TAGS or word in stopwords:
                continue
            lemma = lemmatize(word, g)
            if lemma in g and lemma not in nouns:
                nouns.append(lemma)
                if n is not ALL and len(nouns) == n:
                    break
        logger.debug('tagged nouns of %r: %s', c.text, nouns)
        return nouns
