from pipeline.commands import CAPTIONERS, NOUN_EXTRACTORS, CuratorCommand
from pipeline.exceptions import PlanError
from pipeline.manifests import write_rows
from pipeline.plans import plan_to_dict
from pipeline.rehearsal import rehearse
from pipeline.reports import write_report
from pipeline.types import RehearsalQuery, StepReport
from semfilter.filtering import STOPWORDS, load_stopwords
from semfilter.wordnet import MINI_WORDNET, load_wordnet
from websource.backends import ManifestBackend
from websource.memory import load_memory


class Command(CuratorCommand):
    help = 'Retrieve and filter web rehearsal data for the old classes of a step'
    uses_plan = True

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--manifest', required=True, help='web manifest to query')
        parser.add_argument('--memory', default=None, help='caption memory file')
        parser.add_argument('--wordnet', default=str(MINI_WORDNET),
                            help='directory holding index.noun and data.noun')
        parser.add_argument('--stopwords', default=str(STOPWORDS))
        parser.add_argument('--captioner', choices=CAPTIONERS, default='manifest')
        parser.add_argument('--nouns', choices=NOUN_EXTRACTORS, default='wordnet',
                            help='how caption nouns are found')
        parser.add_argument('--timings', action='store_true',
                            help='put wall time into report.json')

    def run(self, **options):
        plan = self.plan
        backend = ManifestBackend.from_file(options['manifest'])
        memory = None
        if plan.rehearsal_query == RehearsalQuery.CAPTION:
            if not options['memory']:
                raise PlanError('caption querying needs --memory')
            memory = load_memory(options['memory'])
        graph = None
        if plan.use_filter:
            wordnet = options['wordnet']
            graph = load_wordnet(f'{wordnet}/index.noun', f'{wordnet}/data.noun')
        result = rehearse(
            plan, memory, backend,
            self.caption_provider(options['captioner'], backend),
            graph=graph,
            stopwords=load_stopwords(options['stopwords']),
            workers=self.workers,
            extractor=self.noun_extractor(options['nouns']),
        )
        write_rows(result.rows, self.out / 'rehearsal-manifest.jsonl')
        write_report(StepReport(
            plan.protocol, plan.step,
            config={'plan': plan_to_dict(plan)},
            rehearsal=result.funnel,
            wall_time={'rehearse': self.elapsed()},
        ), self.out, options['timings'])

        f = result.funnel
        self.stdout.write(f'retrieved {f.retrieved}, captioned {f.captioned}, '
                          f'filtered {f.filtered}, kept {f.kept}')
        if f.failed_queries:
            self.stderr.write(f'{f.failed_queries} caption queries failed')
