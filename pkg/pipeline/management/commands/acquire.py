from discriminator.checkpoints import load_model
from lexicon.loaders import VOC_LEXICON, load_lexicon
from pipeline.acquisition import acquire_new
from pipeline.commands import CAPTIONERS, CuratorCommand, curator_settings
from pipeline.manifests import write_rows
from pipeline.plans import plan_to_dict
from pipeline.reports import write_report
from pipeline.types import StepReport
from websource.backends import ManifestBackend


class Command(CuratorCommand):
    help = 'Crawl, gate, caption and label training data for the new classes of a step'
    uses_plan = True

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--manifest', required=True,
                            help='web manifest to crawl, or the annotated step manifest '
                                 'of a dataset plan')
        parser.add_argument('--model', default=None, help='discriminator checkpoint')
        parser.add_argument('--lexicon', default=str(VOC_LEXICON))
        parser.add_argument('--captioner', choices=CAPTIONERS, default='manifest')
        parser.add_argument('--allow-empty', action='store_true',
                            help='go on when a class has no survivors')
        parser.add_argument('--timings', action='store_true',
                            help='put wall time into report.json')

    def run(self, **options):
        plan = self.plan
        backend = ManifestBackend.from_file(options['manifest'])
        model, spec = None, None
        if plan.use_discriminator and options['model']:
            model, spec = load_model(options['model'])
        result = acquire_new(
            plan,
            load_lexicon(options['lexicon']),
            self.caption_provider(options['captioner'], backend),
            backend,
            model=model,
            spec=spec,
            allow_empty=options['allow_empty'],
            png_enabled=curator_settings()['PNG_ENABLED'],
            workers=self.workers,
        )
        write_rows(result.rows, self.out / 'train-manifest.jsonl')
        write_report(StepReport(
            plan.protocol, plan.step,
            config={'plan': plan_to_dict(plan)},
            acquisition=result.funnels,
            wall_time={'acquire': self.elapsed()},
        ), self.out, options['timings'])

        for class_name, funnel in result.funnels.items():
            self.stdout.write(f'{class_name}: crawled {funnel.crawled}, gated {funnel.gated}, '
                              f'labeled {funnel.labeled}, kept {funnel.kept}')
        self.stdout.write(f'{len(result.rows)} training records written')
