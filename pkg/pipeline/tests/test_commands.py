import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import CommandError, call_command
from django.test import SimpleTestCase

from pipeline.exceptions import ToyDivergenceError
from pipeline.tests.factories import discriminator_corpus, web_world, write_manifest
from wilss.storage import load_map
from wilss.types import ScoreMap


TOY_PLAN = """\
protocol = toy-3-1
step = 1
old_classes = cat, dog, horse
new_classes = person
per_class_crawl = 40
per_class_keep = 12
per_caption = 4
rehearsal_per_class = 6
use_discriminator = false
"""


def read_jsonl(path):
    return [json.loads(line) for line in Path(path).read_text().splitlines()]


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)
        self.out = self.root / 'out'
        self.plan = self.root / 'toy.plan'
        self.plan.write_text(TOY_PLAN)
        self.web = web_world(self.root)

    def call(self, name, *args):
        stdout = StringIO()
        call_command(name, *args, '--out', str(self.out), stdout=stdout, stderr=StringIO())
        return stdout.getvalue()

    def memorize(self):
        step0 = write_manifest(self.root / 'step0.jsonl', [
            {'id': 's0', 'file': 's0.ppm', 'keywords': [], 'classes': ['cat'],
             'caption': 'a cat sleeping on a sofa'},
            {'id': 's1', 'file': 's1.ppm', 'keywords': [], 'classes': ['dog'],
             'caption': 'a dog running on grass'},
            {'id': 's2', 'file': 's2.ppm', 'keywords': [], 'classes': ['horse'],
             'caption': 'a horse in a field'},
        ])
        self.call('memorize', '--manifest', str(step0))
        return self.out / 'caption_memory.jsonl'


class ToyPipelineTestCase(CommandTestCase):
    """Tests that the commands of one toy step:
        * write their manifests and merge one report.json
        * are reproducible byte for byte
        * train the same model from cached old-model maps as from the old model
        * feed each other up to the summary
    """

    def run_step(self):
        memory = self.memorize()
        self.call('acquire', '--plan', str(self.plan), '--manifest', str(self.web))
        self.call('rehearse', '--plan', str(self.plan), '--manifest', str(self.web),
                  '--memory', str(memory))
        self.call('toy_step', '--plan', str(self.plan),
                  '--manifest', str(self.out / 'train-manifest.jsonl'),
                  '--rehearsal-manifest', str(self.out / 'rehearsal-manifest.jsonl'),
                  '--epochs', '3', '--hidden', '4')

    def test_memorize(self):
        memory = self.memorize()
        self.assertEqual(read_jsonl(memory)[0], {'caption': 'a cat sleeping on a sofa',
                                                 'classes': ['cat']})

    def test_step(self):
        self.run_step()
        train = read_jsonl(self.out / 'train-manifest.jsonl')
        rehearsal = read_jsonl(self.out / 'rehearsal-manifest.jsonl')
        self.assertEqual([row['id'] for row in train],
                         ['person-000', 'person-001', 'person-002', 'person-003'])
        self.assertEqual(len(rehearsal), 9)

        report = json.loads((self.out / 'report.json').read_text())
        self.assertEqual(report['acquisition']['person']['kept'], 4)
        self.assertEqual(report['rehearsal']['kept'], 9)
        self.assertEqual(report['training']['epochs'], 3)
        self.assertEqual(report['training']['rehearsal_images'], 9)
        self.assertEqual(report['config']['weights']['w_kde'], 0.5)
        self.assertNotIn('wall_time', report)

        runs = json.loads((self.out / 'run-config.json').read_text())
        self.assertEqual(sorted(runs), ['acquire', 'memorize', 'rehearse', 'toy_step'])

    def test_reproducible(self):
        self.run_step()
        names = ('train-manifest.jsonl', 'rehearsal-manifest.jsonl', 'toy-model.json',
                 'report.json', 'caption_memory.jsonl')
        first = {name: (self.out / name).read_bytes() for name in names}
        self.run_step()
        for name in names:
            self.assertEqual((self.out / name).read_bytes(), first[name], name)

    def toy_step_with_maps(self, *args):
        self.call('toy_step', '--plan', str(self.plan),
                  '--manifest', str(self.out / 'train-manifest.jsonl'),
                  '--old-maps', str(self.root / 'old-maps'), '--epochs', '3', '--hidden', '4',
                  *args)
        return (self.out / 'toy-model.json').read_bytes()

    def test_old_maps(self):
        self.call('acquire', '--plan', str(self.plan), '--manifest', str(self.web))
        computed = self.toy_step_with_maps()
        ids = [row['id'] for row in read_jsonl(self.out / 'train-manifest.jsonl')]
        scores = load_map(self.root / 'old-maps' / f'{ids[0]}.scores.wmap')
        self.assertIsInstance(scores, ScoreMap)
        self.assertIn('cat', scores.class_order)
        self.assertNotIn('person', scores.class_order)
        self.assertEqual(len(list((self.root / 'old-maps').iterdir())), 2 * len(ids))
        self.assertEqual(self.toy_step_with_maps(), computed)

    def test_timings(self):
        self.call('acquire', '--plan', str(self.plan), '--manifest', str(self.web),
                  '--timings')
        report = json.loads((self.out / 'report.json').read_text())
        self.assertIn('acquire', report['wall_time'])

    def test_report(self):
        self.run_step()
        stdout = self.call('report', str(self.out / 'report.json'), '--svg')
        self.assertIn('== toy-3-1 step 1 ==', stdout)
        self.assertTrue((self.out / 'summary.svg').exists())
        summary = json.loads((self.out / 'summary.json').read_text())
        self.assertEqual([r['step'] for r in summary['steps']], [1])

    def test_seed_override(self):
        self.call('acquire', '--plan', str(self.plan), '--manifest', str(self.web),
                  '--seed', '7')
        report = json.loads((self.out / 'report.json').read_text())
        self.assertEqual(report['config']['plan']['seed'], 7)


class OtherCommandsTestCase(CommandTestCase):
    def corpus_dir(self):
        path = self.root / 'corpus'
        path.mkdir()
        return path

    def test_ablate_filter(self):
        pairs = write_manifest(self.root / 'pairs.jsonl', [
            {'q1': 'a cat on a sofa', 'q2': 'a cat on a sofa'},
            {'q1': 'a dog running on grass', 'q2': 'running quickly'},
        ])
        stdout = self.call('ablate_filter', '--pairs', str(pairs),
                           '--thresholds', '0.5,0.9', '--noun-counts', '2,all')
        table = json.loads((self.out / 'ablation.json').read_text())
        self.assertEqual(len(table), 4)
        self.assertEqual({cell['rate'] for cell in table}, {0.5})
        self.assertEqual(table[-1]['noun_count'], 'all')
        self.assertIn('0.500', stdout)

    def test_train_disc(self):
        dataset, web = discriminator_corpus(self.corpus_dir(), n=10, side=16)
        self.call('train_disc', '--manifest', str(dataset), '--web-manifest', str(web),
                  '--epochs', '2', '--hidden-dims', '8', '--grid-size', '4', '--side', '16',
                  '--holdout-fraction', '0.2')
        self.assertTrue((self.out / 'discriminator.ckpt').exists())
        log = json.loads((self.out / 'train-disc.json').read_text())
        self.assertEqual(len(log['accuracies']), 2)
        self.assertEqual(log['holdout_sizes'], [2, 2])

    def test_acquire_with_checkpoint(self):
        dataset, web = discriminator_corpus(self.corpus_dir(), n=10, side=8)
        self.call('train_disc', '--manifest', str(dataset), '--web-manifest', str(web),
                  '--epochs', '1', '--hidden-dims', '4', '--grid-size', '2', '--side', '8')
        self.call('acquire', '--plan', 'toy-3-1', '--manifest', str(self.web),
                  '--model', str(self.out / 'discriminator.ckpt'), '--allow-empty')
        report = json.loads((self.out / 'report.json').read_text())
        self.assertEqual(report['acquisition']['person']['crawled'], 8)


class ExitCodeTestCase(CommandTestCase):
    """Tests that failures leave with 1 for configuration, 2 for data and 3 for numerics"""

    def assertExitCode(self, code, name, *args):
        with self.assertRaises(CommandError) as cm:
            self.call(name, *args)
        self.assertEqual(cm.exception.returncode, code)

    def test_missing_discriminator(self):
        self.assertExitCode(1, 'acquire', '--plan', 'toy-3-1', '--manifest', str(self.web))

    def test_unknown_plan(self):
        self.assertExitCode(1, 'acquire', '--plan', 'toy-9-9', '--manifest', str(self.web))

    def test_memory_required(self):
        self.assertExitCode(1, 'rehearse', '--plan', str(self.plan),
                            '--manifest', str(self.web))

    def test_bad_hidden_dims(self):
        for dims in ('x', '16,0'):
            self.assertExitCode(1, 'train_disc', '--manifest', str(self.web),
                                '--web-manifest', str(self.web), '--hidden-dims', dims)

    def test_missing_manifest(self):
        self.assertExitCode(2, 'acquire', '--plan', str(self.plan),
                            '--manifest', str(self.root / 'nowhere.jsonl'))

    def test_no_survivors(self):
        self.plan.write_text(TOY_PLAN.replace('new_classes = person', 'new_classes = sheep'))
        self.assertExitCode(2, 'acquire', '--plan', str(self.plan), '--manifest', str(self.web))

    def test_missing_tagger(self):
        pairs = write_manifest(self.root / 'pairs.jsonl', [{'q1': 'a cat', 'q2': 'a cat'}])
        with mock.patch.dict('sys.modules', {'nltk': None}):
            self.assertExitCode(1, 'ablate_filter', '--pairs', str(pairs), '--nouns', 'pos')

    def test_stale_old_maps(self):
        self.call('acquire', '--plan', str(self.plan), '--manifest', str(self.web))
        args = ('toy_step', '--plan', str(self.plan),
                '--manifest', str(self.out / 'train-manifest.jsonl'),
                '--old-maps', str(self.root / 'old-maps'), '--epochs', '1')
        self.call(*args, '--hidden', '4')
        self.assertExitCode(2, *args, '--hidden', '8')
        for path in (self.root / 'old-maps').glob('*.scores.wmap'):
            path.write_bytes(b'junk')
        self.assertExitCode(2, *args, '--hidden', '4')

    def test_divergence(self):
        self.call('acquire', '--plan', str(self.plan), '--manifest', str(self.web))
        with mock.patch('pipeline.management.commands.toy_step.train_toy',
                        side_effect=ToyDivergenceError(2, 'total loss nan')):
            self.assertExitCode(3, 'toy_step', '--plan', str(self.plan),
                                '--manifest', str(self.out / 'train-manifest.jsonl'))

    def test_real_divergence(self):
        self.call('acquire', '--plan', str(self.plan), '--manifest', str(self.web))
        self.assertExitCode(3, 'toy_step', '--plan', str(self.plan),
                            '--manifest', str(self.out / 'train-manifest.jsonl'),
                            '--epochs', '30', '--learning-rate', '1e200')
