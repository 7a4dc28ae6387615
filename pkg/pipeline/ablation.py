"""Kept-rate of the caption filter over a grid of thresholds and noun counts."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from lexicon.types import Caption, CaptionSource
from pipeline.exceptions import EmptyCorpusError, TrainingManifestError
from pipeline.serializers import CaptionPairSerializer
from semfilter.filtering import NounExtractor, extract_nouns, filter_pair
from semfilter.types import FilterConfig, WordnetGraph
from websource.serializers import first_error


logger = logging.getLogger(__name__)

CaptionPair = tuple[Caption, Caption]


@dataclass(frozen=True)
class AblationCell:
    threshold: float
    noun_count: int | None
    kept: int
    total: int

    @property
    def rate(self) -> float:
        return self.kept / self.total


def load_caption_pairs(path) -> list[CaptionPair]:
    """JSONL corpus, one `{"q1": stored caption, "q2": regenerated caption}` per line"""
    try:
        lines = Path(path).read_text(encoding='utf-8').splitlines()
    except OSError as e:
        raise TrainingManifestError(f'cannot read caption pairs {path}: {e}') from e
    pairs = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as e:
            raise TrainingManifestError(f'{path}:{lineno}: invalid JSON: {e.msg}')
        serializer = CaptionPairSerializer(data=data)
        if not serializer.is_valid():
            raise TrainingManifestError(f'{path}:{lineno}: {first_error(serializer.errors)}')
        pairs.append((
            Caption(serializer.validated_data['q1'], CaptionSource.STORED),
            Caption(serializer.validated_data['q2'], CaptionSource.REGENERATED),
        ))
    return pairs


def best_similarities(pairs: Sequence[CaptionPair], graph: WordnetGraph,
                      noun_count: int | None,
                      stopwords: Iterable[str] | None = None,
                      extractor: NounExtractor = extract_nouns) -> list[float | None]:
    """Best noun-pair similarity per caption pair, None when a caption has no nouns"""
    cfg = FilterConfig(threshold=0.0, noun_count=noun_count)
    best = []
    for q1, q2 in pairs:
        decision = filter_pair(q1, q2, graph, cfg, stopwords, extractor)
        best.append(decision.best_similarity if decision.kept else None)
    return best


def ablate_filter(pairs: Sequence[CaptionPair], graph: WordnetGraph,
                  thresholds: Sequence[float], noun_counts: Sequence[int | None],
                  stopwords: Iterable[str] | None = None,
                  extractor: NounExtractor = extract_nouns) -> list[AblationCell]:
    """
    One cell per (noun count, threshold), noun counts outermost. A pair is
    kept at T exactly when filter_pair would keep it with threshold T.
    """
    if not pairs:
        raise EmptyCorpusError('caption pair corpus is empty')
    for threshold in thresholds:
        FilterConfig(threshold=threshold)
    stopwords = None if stopwords is None else frozenset(stopwords)

    cells = []
    for noun_count in noun_counts:
        best = best_similarities(pairs, graph, noun_count, stopwords, extractor)
        for threshold in thresholds:
            kept = sum(1 for b in best if b is not None and b >= threshold)
            cells.append(AblationCell(threshold, noun_count, kept, len(pairs)))
            logger.info('N=%s T=%.2f: kept %d of %d', 'all' if noun_count is None
                        else noun_count, threshold, kept, len(pairs))
    return cells


def format_table(cells: Sequence[AblationCell]) -> str:
    thresholds = sorted({c.threshold for c in cells})
    noun_counts = list(dict.fromkeys(c.noun_count for c in cells))
    rates = {(c.noun_count, c.threshold): c.rate for c in cells}
    header = ['N \\ T'] + [f'{t:.2f}' for t in thresholds]
    lines = ['  '.join(f'{h:>6}' for h in header)]
    for n in noun_counts:
        row = ['all' if n is None else str(n)]
        row += [f'{rates[(n, t)]:.3f}' if (n, t) in rates else '-' for t in thresholds]
        lines.append('  '.join(f'{v:>6}' for v in row))
    return '\n'.join(lines) + '\n'
