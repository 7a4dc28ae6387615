from django.test import SimpleTestCase

from pipeline.exceptions import PlanError
from pipeline.plans import PLANS_DIR, load_plan, parse_plan, plan_to_dict
from pipeline.types import Labeling, RehearsalQuery, TrainSource
from wilss.types import BACKGROUND


MINIMAL = """
# smallest valid plan
protocol = 15-5
step = 1
old_classes = cat, dining table
new_classes = dog
"""


class ParsePlanTestCase(SimpleTestCase):
    """Tests that plan parsing:
        * fills every key left out with its default
        * splits class lists on commas only
        * names the line of a malformed, unknown or repeated key
        * rejects inconsistent class sets and budgets
    """

    def test_defaults(self):
        plan = parse_plan(MINIMAL)
        self.assertEqual(plan.old_classes, ('cat', 'dining table'))
        self.assertEqual(plan.new_classes, ('dog',))
        self.assertEqual(plan.train_source, TrainSource.WEB)
        self.assertEqual(plan.labeling, Labeling.CAPTION)
        self.assertEqual(plan.rehearsal_query, RehearsalQuery.CAPTION)
        self.assertTrue(plan.use_discriminator)
        self.assertTrue(plan.use_filter)
        self.assertEqual(plan.budget.per_class_keep, 500)
        self.assertEqual(plan.budget.per_caption, 20)
        self.assertEqual(plan.filter_config.threshold, 0.6)
        self.assertEqual(plan.filter_config.noun_count, 2)

    def test_defaults_argument(self):
        plan = parse_plan(MINIMAL, defaults={'per_caption': 7, 'noun_count': 'all'})
        self.assertEqual(plan.per_caption, 7)
        self.assertIsNone(plan.noun_count)

    def test_file_beats_defaults(self):
        plan = parse_plan(MINIMAL + 'per_caption = 3\n', defaults={'per_caption': 7})
        self.assertEqual(plan.per_caption, 3)

    def test_switches(self):
        plan = parse_plan(MINIMAL + 'use_discriminator = false\nlabeling = naive\n'
                          'rehearsal_query = class_name\nuse_filter = false\n')
        self.assertFalse(plan.use_discriminator)
        self.assertEqual(plan.labeling, Labeling.NAIVE)
        self.assertEqual(plan.rehearsal_query, RehearsalQuery.CLASS_NAME)
        self.assertFalse(plan.use_filter)

    def test_derived(self):
        plan = parse_plan(MINIMAL)
        self.assertEqual(plan.label_set, ('cat', 'dining table', 'dog'))
        self.assertEqual(plan.context.old_classes, (BACKGROUND, 'cat', 'dining table'))
        self.assertEqual(plan.context.new_classes, ('dog',))

    def test_missing_equals(self):
        with self.assertRaises(PlanError) as ctx:
            parse_plan(MINIMAL + 'seed 3\n')
        self.assertEqual(ctx.exception.line, 7)

    def test_unknown_key(self):
        with self.assertRaises(PlanError) as ctx:
            parse_plan('protocol = x\nlearning_rate = 0.1\n')
        self.assertEqual(ctx.exception.line, 2)

    def test_repeated_key(self):
        with self.assertRaises(PlanError) as ctx:
            parse_plan(MINIMAL + 'step = 2\n')
        self.assertEqual(ctx.exception.line, 7)

    def test_missing_required(self):
        with self.assertRaises(PlanError):
            parse_plan('protocol = 15-5\nstep = 1\n')

    def test_class_overlap(self):
        with self.assertRaises(PlanError):
            parse_plan('protocol = p\nstep = 1\nold_classes = cat, dog\nnew_classes = dog\n')

    def test_no_new_classes(self):
        with self.assertRaises(PlanError):
            parse_plan('protocol = p\nstep = 1\nold_classes = cat\nnew_classes =\n')

    def test_step_zero(self):
        with self.assertRaises(PlanError):
            parse_plan(MINIMAL.replace('step = 1', 'step = 0'))

    def test_keep_above_crawl(self):
        with self.assertRaises(PlanError):
            parse_plan(MINIMAL + 'per_class_crawl = 10\nper_class_keep = 11\n')

    def test_bad_values(self):
        for extra in ('threshold = 1.5\n', 'noun_count = 0\n', 'labeling = fancy\n',
                      'old_classes_extra = 1\n'):
            with self.assertRaises(PlanError, msg=extra):
                parse_plan(MINIMAL + extra)

    def test_rehearsal_needs_old_classes(self):
        with self.assertRaises(PlanError):
            parse_plan('protocol = p\nstep = 1\nold_classes =\nnew_classes = cat\n')
        plan = parse_plan('protocol = p\nstep = 1\nold_classes =\nnew_classes = cat\n'
                          'rehearsal = none\n')
        self.assertEqual(plan.old_classes, ())

    def test_dict_echo(self):
        data = plan_to_dict(parse_plan(MINIMAL))
        self.assertEqual(data['protocol'], '15-5')
        self.assertEqual(list(data['old_classes']), ['cat', 'dining table'])


class BundledPlansTestCase(SimpleTestCase):
    def test_all_parse(self):
        plans = sorted(PLANS_DIR.glob('*.plan'))
        self.assertEqual(len(plans), 9)
        for path in plans:
            plan = load_plan(path)
            self.assertEqual(plan.step, 1)
            self.assertFalse(set(plan.old_classes) & set(plan.new_classes))

    def test_voc_protocols(self):
        expected = {
            'voc-15-5-ov': (15, 5, True),
            'voc-15-5-dis': (15, 5, False),
            'voc-10-10-ov': (10, 10, True),
            'voc-15-1-ov': (15, 1, True),
            'voc-10-1-dis': (10, 1, False),
        }
        for name, (n_old, n_new, overlapped) in expected.items():
            plan = load_plan(name)
            self.assertEqual(len(plan.old_classes), n_old, name)
            self.assertEqual(len(plan.new_classes), n_new, name)
            self.assertEqual(plan.overlapped, overlapped, name)

    def test_toy_plan(self):
        plan = load_plan('toy-3-1')
        self.assertEqual(plan.old_classes, ('cat', 'dog', 'horse'))
        self.assertEqual(plan.new_classes, ('person',))
        self.assertEqual(plan.budget.per_caption, 4)
        self.assertEqual(plan.budget.rehearsal_per_class, 6)

    def test_missing(self):
        with self.assertRaises(PlanError):
            load_plan(PLANS_DIR / 'absent.plan')
