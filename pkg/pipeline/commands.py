from __future__ import annotations

import logging
import time
from dataclasses import replace
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from pipeline.plans import load_plan
from pipeline.reports import write_run_config
from pipeline.types import StepPlan
from semfilter.filtering import NounExtractor, extract_nouns
from semfilter.taggers import PosTagNounExtractor
from webwilss.exceptions import ConfigurationError, CuratorError
from websource.backends import ManifestBackend
from websource.captions import CaptionProvider, HttpCaptionProvider, ManifestCaptionProvider


logger = logging.getLogger(__name__)

CAPTIONERS = ('manifest', 'http')
NOUN_EXTRACTORS = ('wordnet', 'pos')


def curator_settings() -> dict:
    return settings.CURATOR


def plan_defaults() -> dict:
    """Budget and filter defaults a plan file may override"""
    conf = curator_settings()
    return {
        'per_class_crawl': conf['PER_CLASS_CRAWL'],
        'per_class_keep': conf['PER_CLASS_KEEP'],
        'per_caption': conf['PER_CAPTION'],
        'rehearsal_per_class': conf['REHEARSAL_PER_CLASS'],
        'threshold': conf['FILTER_THRESHOLD'],
        'noun_count': conf['FILTER_NOUN_COUNT'],
    }


class CuratorCommand(BaseCommand):
    """
    Base for the pipeline commands: subclasses implement run(**options).
    Curator errors leave with their exit code (1 configuration, 2 data,
    3 numerical); every run with --out echoes its options and wall time
    to run-config.json.
    """
    uses_plan = False

    def add_arguments(self, parser):
        parser.add_argument('--out', required=True, help='output directory')
        parser.add_argument('--workers', type=int, default=None,
                            help='thread count for per-record stages')
        if self.uses_plan:
            parser.add_argument('--plan', required=True,
                                help='plan file, or the name of a bundled plan')
            parser.add_argument('--seed', type=int, default=None,
                                help='overrides the seed of the plan')

    def handle(self, *args, **options):
        started = time.perf_counter()
        out = Path(options['out'])
        try:
            out.mkdir(parents=True, exist_ok=True)
            self.out = out
            self.workers = options['workers'] or curator_settings()['WORKERS']
            self.plan = self.load_plan(options) if self.uses_plan else None
            self.started = started
            self.run(**options)
        except CuratorError as e:
            logger.debug('command failed', exc_info=True)
            raise CommandError(str(e), returncode=e.exit_code) from e
        wall_time = time.perf_counter() - started
        write_run_config(out, self.command_name(), self.echo(options), wall_time)

    def run(self, **options):
        raise NotImplementedError

    def command_name(self) -> str:
        return self.__module__.rsplit('.', 1)[-1]

    def elapsed(self) -> float:
        return time.perf_counter() - self.started

    @staticmethod
    def echo(options: dict) -> dict:
        skipped = {'verbosity', 'settings', 'pythonpath', 'traceback', 'no_color',
                   'force_color', 'skip_checks'}
        return {key: value for key, value in sorted(options.items()) if key not in skipped}

    def load_plan(self, options) -> StepPlan:
        plan = load_plan(options['plan'], plan_defaults())
        if options.get('seed') is not None:
            plan = replace(plan, seed=options['seed'])
        return plan

    def caption_provider(self, captioner: str, backend: ManifestBackend) -> CaptionProvider:
        if captioner == 'manifest':
            return ManifestCaptionProvider.from_backend(backend)
        if captioner == 'http':
            return HttpCaptionProvider.from_settings()
        raise ConfigurationError(f'unknown captioner `{captioner}`')

    def noun_extractor(self, name: str) -> NounExtractor:
        """WordNet membership by default, NLTK's tagger for `pos`"""
        if name == 'wordnet':
            return extract_nouns
        if name == 'pos':
            return PosTagNounExtractor()
        raise ConfigurationError(f'unknown noun extractor `{name}`')
