"""
Rehearsal data for old classes: query the web with stored step-0 captions,
caption what comes back, keep records whose new caption is semantically
close to the stored one and cap the result per old class.
"""
from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable

from lexicon.types import Caption, CaptionSource
from pipeline.types import RehearsalFunnel, RehearsalQuery, RehearsalResult, RehearsalRow, StepPlan
from semfilter.filtering import NounExtractor, extract_nouns, filter_pair
from semfilter.types import WordnetGraph
from semfilter.wordnet import load_wordnet
from webwilss.exceptions import CuratorError
from websource.backends import WebBackend, query_backend
from websource.captions import CaptionProvider, caption_of
from websource.memory import rehearsal_query
from websource.types import CaptionMemory, WebRecord


logger = logging.getLogger(__name__)


def _class_name_query(plan: StepPlan, backend: WebBackend) -> tuple[list[WebRecord], int]:
    """Naive retrieval: every old class name is its own query and caption"""
    records, seen, failures = [], set(), 0
    for class_name in plan.old_classes:
        try:
            found = query_backend(backend, class_name, plan.rehearsal_per_class)
        except CuratorError as e:
            logger.warning('rehearsal query %r failed: %s', class_name, e)
            failures += 1
            continue
        for rec in found:
            if rec.source_id not in seen:
                seen.add(rec.source_id)
                records.append(WebRecord(rec.source_id, rec.image_ref, class_name,
                                         None, rec.keywords, (class_name,)))
    return records, failures


class Rehearser:
    def __init__(self, plan: StepPlan, backend: WebBackend, provider: CaptionProvider,
                 graph: WordnetGraph | None = None,
                 stopwords: Iterable[str] | None = None, workers: int = 1,
                 extractor: NounExtractor = extract_nouns):
        self.plan = plan
        self.backend = backend
        self.provider = provider
        if graph is None and plan.use_filter:
            graph = load_wordnet()
        self.graph = graph
        self.stopwords = stopwords
        self.workers = workers
        self.extractor = extractor

    def run(self, memory: CaptionMemory | None = None) -> RehearsalResult:
        result = RehearsalResult(funnel=RehearsalFunnel())
        funnel = result.funnel

        if self.plan.rehearsal_query == RehearsalQuery.CAPTION:
            queried = rehearsal_query(memory or CaptionMemory(), self.backend,
                                      self.plan.budget, self.workers)
            records = queried.records
            funnel.failed_queries = len(queried.failures)
        else:
            records, funnel.failed_queries = _class_name_query(self.plan, self.backend)
        funnel.retrieved = len(records)

        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                checked = list(executor.map(self._check, records))
        else:
            checked = [self._check(rec) for rec in records]

        counts = Counter()
        cap = self.plan.rehearsal_per_class
        for rec, caption, decision in checked:
            if caption is None:
                continue
            funnel.captioned += 1
            if decision is not None and not decision.kept:
                continue
            funnel.filtered += 1
            if not rec.classes:
                # the cap is per class
                logger.debug('untagged rehearsal record %s dropped', rec.source_id)
                continue
            if any(counts[c] >= cap for c in rec.classes):
                logger.debug('cap reached for %s, dropping %s', rec.classes, rec.source_id)
                continue
            counts.update(rec.classes)
            result.rows.append(RehearsalRow(
                id=rec.source_id,
                file=rec.image_ref,
                queried_with=rec.queried_with,
                classes=rec.classes,
                caption=caption,
                similarity=None if decision is None else decision.best_similarity,
            ))
        funnel.kept = len(result.rows)
        result.per_class = {c: counts[c] for c in sorted(counts)}
        logger.info('rehearsal: retrieved %d, captioned %d, filtered %d, kept %d, '
                    '%d failed queries', funnel.retrieved, funnel.captioned,
                    funnel.filtered, funnel.kept, funnel.failed_queries)
        return result

    def _check(self, rec: WebRecord):
        try:
            regenerated = caption_of(self.provider, rec)
        except CuratorError as e:
            logger.warning('no caption for %s: %s', rec.source_id, e)
            return rec, None, None
        if not self.plan.use_filter:
            return rec, regenerated.text, None
        stored = Caption(rec.queried_with, CaptionSource.STORED)
        decision = filter_pair(stored, Caption(regenerated.text, CaptionSource.REGENERATED),
                               self.graph, self.plan.filter_config, self.stopwords,
                               self.extractor)
        if not decision.kept:
            logger.debug('filter reject %s (%s): %r vs %r', rec.source_id,
                         decision.reason, stored.text, regenerated.text)
        return rec, regenerated.text, decision


def rehearse(plan: StepPlan, memory: CaptionMemory | None, backend: WebBackend,
             provider: CaptionProvider, graph: WordnetGraph | None = None,
             stopwords: Iterable[str] | None = None, workers: int = 1,
             extractor: NounExtractor = extract_nouns) -> RehearsalResult:
    rehearser = Rehearser(plan, backend, provider, graph, stopwords, workers, extractor)
    return rehearser.run(memory)
