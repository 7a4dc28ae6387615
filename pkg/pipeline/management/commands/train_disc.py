import json

from discriminator.checkpoints import FeatureSpec, save_model
from discriminator.types import TrainConfig
from pipeline.commands import CuratorCommand, curator_settings
from pipeline.trainers import train_discriminator
from websource.backends import ManifestBackend
from webwilss.exceptions import ConfigurationError


def parse_hidden_dims(value: str) -> list[int]:
    try:
        dims = [int(d) for d in value.split(',') if d.strip()]
    except ValueError:
        raise ConfigurationError(f'--hidden-dims expects comma separated integers, got `{value}`')
    if any(d <= 0 for d in dims):
        raise ConfigurationError(f'--hidden-dims must be positive, got `{value}`')
    return dims


class Command(CuratorCommand):
    help = 'Train the Fourier-domain discriminator on dataset vs web images'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        conf = curator_settings()
        parser.add_argument('--manifest', required=True,
                            help='manifest of step-0 dataset images (positives)')
        parser.add_argument('--web-manifest', required=True,
                            help='manifest of crawled web images (negatives)')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--epochs', type=int, default=conf['DISCRIMINATOR_EPOCHS'])
        parser.add_argument('--learning-rate', type=float,
                            default=conf['DISCRIMINATOR_LEARNING_RATE'])
        parser.add_argument('--batch-size', type=int, default=conf['DISCRIMINATOR_BATCH_SIZE'])
        parser.add_argument('--hidden-dims', default=','.join(
            str(d) for d in conf['DISCRIMINATOR_HIDDEN_DIMS']))
        parser.add_argument('--grid-size', type=int, default=conf['SPECTRUM_GRID_SIZE'])
        parser.add_argument('--side', type=int, default=conf['IMAGE_SIDE'])
        parser.add_argument('--domain', default=conf['FEATURE_DOMAIN'],
                            choices=('amplitude', 'phase', 'pixel'))
        parser.add_argument('--holdout-fraction', type=float, default=0.0)
        parser.add_argument('--target-accuracy', type=float, default=None)

    def run(self, **options):
        hidden = parse_hidden_dims(options['hidden_dims'])
        dataset = ManifestBackend.from_file(options['manifest'])
        web = ManifestBackend.from_file(options['web_manifest'])
        spec = FeatureSpec(options['grid_size'], options['side'], options['domain'])
        cfg = TrainConfig(
            learning_rate=options['learning_rate'],
            epochs=options['epochs'],
            batch_size=options['batch_size'],
            seed=options['seed'],
            target_accuracy=options['target_accuracy'],
        )
        run = train_discriminator(
            dataset.records, web.records, spec, hidden, cfg,
            holdout_fraction=options['holdout_fraction'],
            png_enabled=curator_settings()['PNG_ENABLED'],
            workers=self.workers,
        )
        save_model(run.model, spec, self.out / 'discriminator.ckpt')
        log = {
            'accuracies': run.history.accuracies,
            'losses': run.history.losses,
            'stopped_early': run.history.stopped_early,
            'train_sizes': list(run.train_sizes),
            'holdout_sizes': list(run.holdout_sizes),
            'holdout_accuracy': run.holdout_accuracy,
        }
        (self.out / 'train-disc.json').write_text(
            json.dumps(log, indent=2, sort_keys=True) + '\n', encoding='utf-8')

        self.stdout.write(f'training accuracy {run.history.accuracies[-1]:.4f} '
                          f'after {len(run.history.accuracies)} epochs')
        if run.holdout_accuracy is not None:
            self.stdout.write(f'holdout accuracy {run.holdout_accuracy:.4f}')
