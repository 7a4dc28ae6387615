import json

from pipeline.commands import CuratorCommand
from pipeline.reports import load_report, render_svg, render_text, summarize


class Command(CuratorCommand):
    help = 'Summarize step reports as JSON and text, optionally with a loss plot'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('reports', nargs='+', help='report.json files, one per step')
        parser.add_argument('--svg', action='store_true', help='also plot the loss curves')

    def run(self, **options):
        summary = summarize([load_report(path) for path in options['reports']])
        text = render_text(summary)
        (self.out / 'summary.json').write_text(
            json.dumps(summary, indent=2, sort_keys=True, ensure_ascii=False) + '\n',
            encoding='utf-8')
        (self.out / 'summary.txt').write_text(text, encoding='utf-8')
        if options['svg']:
            render_svg(summary, self.out / 'summary.svg')
        self.stdout.write(text, ending='')
