import json

from pipeline.ablation import ablate_filter, format_table, load_caption_pairs
from pipeline.commands import NOUN_EXTRACTORS, CuratorCommand
from semfilter.filtering import STOPWORDS, load_stopwords
from semfilter.wordnet import MINI_WORDNET, load_wordnet
from webwilss.exceptions import ConfigurationError


def parse_floats(value: str) -> list[float]:
    try:
        return [float(v) for v in value.split(',') if v.strip()]
    except ValueError:
        raise ConfigurationError(f'expected comma separated numbers, got `{value}`')


def parse_noun_counts(value: str) -> list[int | None]:
    counts = []
    for v in (v.strip().lower() for v in value.split(',')):
        if v == 'all':
            counts.append(None)
        elif v.isdigit() and int(v) > 0:
            counts.append(int(v))
        elif v:
            raise ConfigurationError(f'noun count must be a positive integer or all, got `{v}`')
    return counts


class Command(CuratorCommand):
    help = 'Kept-rate of the caption filter over thresholds and noun counts'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--pairs', required=True,
                            help='JSONL of {"q1": ..., "q2": ...} caption pairs')
        parser.add_argument('--thresholds', default='0.5,0.6,0.7')
        parser.add_argument('--noun-counts', default='1,2,all')
        parser.add_argument('--wordnet', default=str(MINI_WORDNET))
        parser.add_argument('--stopwords', default=str(STOPWORDS))
        parser.add_argument('--nouns', choices=NOUN_EXTRACTORS, default='wordnet',
                            help='how caption nouns are found')

    def run(self, **options):
        wordnet = options['wordnet']
        cells = ablate_filter(
            load_caption_pairs(options['pairs']),
            load_wordnet(f'{wordnet}/index.noun', f'{wordnet}/data.noun'),
            parse_floats(options['thresholds']),
            parse_noun_counts(options['noun_counts']),
            load_stopwords(options['stopwords']),
            self.noun_extractor(options['nouns']),
        )
        table = [
            {'threshold': c.threshold,
             'noun_count': 'all' if c.noun_count is None else c.noun_count,
             'kept': c.kept, 'total': c.total, 'rate': c.rate}
            for c in cells
        ]
        (self.out / 'ablation.json').write_text(
            json.dumps(table, indent=2, sort_keys=True) + '\n', encoding='utf-8')
        self.stdout.write(format_table(cells), ending='')
