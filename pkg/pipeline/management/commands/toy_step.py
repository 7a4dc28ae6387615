from dataclasses import replace

from pipeline.commands import CuratorCommand, curator_settings
from pipeline.manifests import read_rows
from pipeline.plans import plan_to_dict
from pipeline.reports import write_report
from pipeline.toy import (
    ToyConfig,
    extend_model,
    init_toy_model,
    load_samples,
    load_toy_model,
    save_toy_model,
    train_toy,
)
from pipeline.types import RehearsalMode, RehearsalRow, StepReport, TrainingRow
from wilss.types import LossWeights


class Command(CuratorCommand):
    help = 'Train the toy segmenter of a step on the acquired and rehearsal data'
    uses_plan = True

    def add_arguments(self, parser):
        super().add_arguments(parser)
        conf = curator_settings()
        parser.add_argument('--manifest', required=True)
        parser.add_argument('--rehearsal-manifest', default=None)
        parser.add_argument('--old-model', default=None,
                            help='toy model of the previous step; a seeded stub otherwise')
        parser.add_argument('--old-maps', default=None,
                            help='directory of frozen old-model maps; missing ones are '
                                 'computed and written there')
        parser.add_argument('--epochs', type=int, default=30)
        parser.add_argument('--warmup-epochs', type=int, default=0)
        parser.add_argument('--learning-rate', type=float, default=conf['TOY_LEARNING_RATE'])
        parser.add_argument('--hidden', type=int, default=8)
        for part in ('seg', 'cls', 'kde', 'kdl'):
            parser.add_argument(f'--w-{part}', type=float, default=None)
        parser.add_argument('--timings', action='store_true',
                            help='put wall time into report.json')

    def loss_weights(self, options) -> LossWeights:
        if self.plan.rehearsal == RehearsalMode.WEB:
            weights = LossWeights(w_kde=curator_settings()['REHEARSAL_KDE_WEIGHT'])
        else:
            weights = LossWeights()
        overrides = {f'w_{part}': options[f'w_{part}'] for part in ('seg', 'cls', 'kde', 'kdl')
                     if options[f'w_{part}'] is not None}
        return replace(weights, **overrides)

    def run(self, **options):
        plan = self.plan
        ctx = plan.context
        conf = curator_settings()
        if options['old_model']:
            old = load_toy_model(options['old_model'])
        else:
            old = init_toy_model(ctx.old_classes, options['hidden'], plan.seed)
        model = extend_model(old, ctx, plan.seed + 1)

        train_rows = read_rows(options['manifest'], TrainingRow)
        rehearsal_rows = []
        if options['rehearsal_manifest']:
            rehearsal_rows = read_rows(options['rehearsal_manifest'], RehearsalRow)
        samples = load_samples(train_rows, rehearsal_rows, old, ctx, plan.label_set,
                               conf['PNG_ENABLED'], maps_dir=options['old_maps'])

        cfg = ToyConfig(
            epochs=options['epochs'],
            learning_rate=options['learning_rate'],
            warmup_epochs=options['warmup_epochs'],
            alpha=conf['SMOOTHING_ALPHA'],
            weights=self.loss_weights(options),
        )
        model, summary = train_toy(model, samples, ctx, cfg)
        save_toy_model(model, self.out / 'toy-model.json')
        write_report(StepReport(
            plan.protocol, plan.step,
            config={'plan': plan_to_dict(plan), 'weights': summary.weights},
            training=summary,
            wall_time={'toy_step': self.elapsed()},
        ), self.out, options['timings'])

        self.stdout.write(f'loss {summary.losses[0]:.6f} -> {summary.losses[-1]:.6f} '
                          f'over {summary.epochs} epochs')
