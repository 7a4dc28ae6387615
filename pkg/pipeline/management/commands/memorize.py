from pipeline.commands import CAPTIONERS, CuratorCommand
from websource.backends import ManifestBackend
from websource.memory import build_caption_memory, save_memory


class Command(CuratorCommand):
    help = 'Caption the step-0 images and store the captions as rehearsal memory'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--manifest', required=True, help='step-0 dataset manifest')
        parser.add_argument('--captioner', choices=CAPTIONERS, default='manifest')

    def run(self, **options):
        backend = ManifestBackend.from_file(options['manifest'])
        provider = self.caption_provider(options['captioner'], backend)
        memory = build_caption_memory(backend.records, provider, self.workers)
        save_memory(memory, self.out / 'caption_memory.jsonl')
        self.stdout.write(f'{len(memory)} captions memorized')
