"""
Acquisition of new-class training data: crawl by class name, gate with the
Fourier discriminator, caption, label from the caption, drop records whose
caption misses the queried class, keep the best-scored survivors.

A plan with train_source = dataset skips all of that and reads the image-level
labels straight from the `classes` of the step manifest.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from discriminator.checkpoints import FeatureSpec
from discriminator.gate import gate_many, rank_by_score
from discriminator.types import GateDecision, MlpModel
from imaging.loaders import load_image
from imaging.transforms import image_features
from imaging.types import SpectrumFeature
from lexicon.labeling import derive_label, naive_label, should_discard
from lexicon.types import ClassLexicon, MultiLabel
from pipeline.exceptions import DatasetSourceError, MissingDiscriminatorError, NoSurvivorsError
from pipeline.types import (
    AcquisitionResult, Funnel, Labeling, StepPlan, TrainingRow, TrainSource,
)
from webwilss.exceptions import CuratorError
from websource.backends import ManifestBackend, WebBackend, query_backend
from websource.captions import CaptionProvider, caption_of
from websource.types import WebRecord


logger = logging.getLogger(__name__)


def _ordered_map(fn, items: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


def record_features(records: Sequence[WebRecord], spec: FeatureSpec,
                    png_enabled: bool = True,
                    workers: int = 1) -> list[SpectrumFeature | None]:
    """Feature per record, None where the image could not be read"""
    def features(rec: WebRecord) -> SpectrumFeature | None:
        try:
            img = load_image(rec.image_ref, png_enabled)
            return image_features(img, spec.side, spec.grid_size, spec.domain)
        except CuratorError as e:
            logger.warning('skipping %s: %s', rec.source_id, e)
            return None

    return _ordered_map(features, records, workers)


class Acquirer:
    def __init__(self, plan: StepPlan, lexicon: ClassLexicon, provider: CaptionProvider,
                 backend: WebBackend, model: MlpModel | None = None,
                 spec: FeatureSpec | None = None, png_enabled: bool = True,
                 workers: int = 1):
        self.plan = plan
        self.lexicon = lexicon
        self.provider = provider
        self.backend = backend
        self.model = model
        self.spec = spec
        self.png_enabled = png_enabled
        self.workers = workers
        if plan.train_source == TrainSource.DATASET:
            if not isinstance(backend, ManifestBackend):
                raise DatasetSourceError('a dataset train source needs a manifest backend')
        elif plan.use_discriminator and (model is None or spec is None):
            raise MissingDiscriminatorError(
                'gating needs a discriminator checkpoint; pass one or switch use_discriminator off'
            )

    def run(self, allow_empty: bool = False) -> AcquisitionResult:
        result = AcquisitionResult()
        emitted = set()
        for class_name in self.plan.new_classes:
            kept, funnel = self.acquire_class(class_name)
            result.funnels[class_name] = funnel
            if not kept:
                if not allow_empty:
                    raise NoSurvivorsError(class_name)
                logger.warning('class `%s`: no survivors, continuing', class_name)
            for row in kept:
                # a record reached by several queries stays with the first class
                if row.id not in emitted:
                    emitted.add(row.id)
                    result.rows.append(row)
        logger.info('acquired %d training records for %d classes',
                    len(result.rows), len(self.plan.new_classes))
        return result

    def acquire_class(self, class_name: str) -> tuple[list[TrainingRow], Funnel]:
        if self.plan.train_source == TrainSource.DATASET:
            return self.dataset_class(class_name)
        budget = self.plan.budget
        funnel = Funnel()
        records = query_backend(self.backend, class_name, budget.per_class_crawl)
        funnel.crawled = len(records)

        gated = self._gate(records, funnel)
        funnel.gated = len(gated)

        labeled = []
        for rec, label, caption, decision in _ordered_map(
                lambda item: self._label(class_name, *item), gated, self.workers):
            if label is None:
                funnel.failed += 1
                continue
            if should_discard(label, class_name):
                logger.debug('discard %s: caption %r misses `%s`',
                             rec.source_id, caption, class_name)
                continue
            labeled.append((rec, label, caption, decision))
        funnel.labeled = len(labeled)

        ranked = rank_by_score(labeled, [item[3] for item in labeled])
        if len(ranked) < budget.per_class_keep:
            logger.warning('class `%s`: only %d survivors for %d slots',
                           class_name, len(ranked), budget.per_class_keep)
        kept = [
            TrainingRow(
                id=rec.source_id,
                file=rec.image_ref,
                queried_with=class_name,
                classes=tuple(label.positives),
                label=label.bits,
                score=decision.score,
                caption=caption,
            )
            for rec, label, caption, decision in ranked[:budget.per_class_keep]
        ]
        funnel.kept = len(kept)
        logger.info('class `%s`: crawled %d, gated %d, labeled %d, kept %d, failed %d',
                    class_name, funnel.crawled, funnel.gated, funnel.labeled,
                    funnel.kept, funnel.failed)
        return kept, funnel

    def dataset_class(self, class_name: str) -> tuple[list[TrainingRow], Funnel]:
        """Annotated records of the class, labels restricted to the label set"""
        budget = self.plan.budget
        label_set = self.plan.label_set
        funnel = Funnel()
        records = [rec for rec in self.backend.records if class_name in rec.classes]
        records = records[:budget.per_class_crawl]
        funnel.crawled = funnel.gated = funnel.labeled = len(records)
        kept = []
        for rec in records[:budget.per_class_keep]:
            label = MultiLabel.from_classes(label_set, rec.classes)
            kept.append(TrainingRow(
                id=rec.source_id,
                file=rec.image_ref,
                queried_with=class_name,
                classes=tuple(label.positives),
                label=label.bits,
                score=1.0,
            ))
        funnel.kept = len(kept)
        logger.info('class `%s`: %d annotated records, kept %d',
                    class_name, funnel.crawled, funnel.kept)
        return kept, funnel

    def _gate(self, records: list[WebRecord], funnel: Funnel):
        if not self.plan.use_discriminator:
            return [(rec, GateDecision(1.0, 0.0, True, 1.0)) for rec in records]
        features = record_features(records, self.spec, self.png_enabled, self.workers)
        readable = [(rec, f) for rec, f in zip(records, features) if f is not None]
        funnel.failed += len(records) - len(readable)
        decisions = gate_many(self.model, [f for _, f in readable], self.workers)
        accepted = []
        for (rec, _), decision in zip(readable, decisions):
            if decision.accepted:
                accepted.append((rec, decision))
            else:
                logger.debug('gate reject %s: p_ds %.4f', rec.source_id, decision.p_ds)
        return accepted

    def _label(self, class_name: str, rec: WebRecord, decision: GateDecision):
        label_set = self.plan.label_set
        if self.plan.labeling == Labeling.NAIVE:
            return rec, naive_label(class_name, label_set), None, decision
        try:
            caption = caption_of(self.provider, rec)
        except CuratorError as e:
            logger.warning('no caption for %s: %s', rec.source_id, e)
            return rec, None, None, decision
        label: MultiLabel = derive_label(caption, self.lexicon, label_set)
        return rec, label, caption.text, decision


def acquire_new(plan: StepPlan, lexicon: ClassLexicon, provider: CaptionProvider,
                backend: WebBackend, model: MlpModel | None = None,
                spec: FeatureSpec | None = None, allow_empty: bool = False,
                png_enabled: bool = True, workers: int = 1) -> AcquisitionResult:
    acquirer = Acquirer(plan, lexicon, provider, backend, model, spec,
                        png_enabled, workers)
    return acquirer.run(allow_empty)
