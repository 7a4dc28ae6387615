import numpy as np
from django.test import SimpleTestCase

from wilss.exceptions import ClassSetMismatchError
from wilss.fusion import fuse_pseudo, fuse_pseudo_backward, image_label_from_pixel
from wilss.tests.helpers import assert_grad_close, numeric_grad, random_probabilities
from wilss.types import ScoreMap, StepContext


CTX = StepContext(old_classes=('background', 'dog', 'cat'), new_classes=('sofa', 'tv'))


def oracle_fuse(loc, prev, ctx):
    """Per-pixel, per-class branch evaluation"""
    out = np.zeros((loc.num_pixels, len(ctx.all_classes)))
    for i in range(loc.num_pixels):
        for j, c in enumerate(ctx.all_classes):
            local = loc.scores[i, loc.class_order.index(c)]
            if c == ctx.background:
                out[i, j] = min(prev.scores[i, prev.class_order.index(c)], local)
            elif c in ctx.new_classes:
                out[i, j] = local
            else:
                out[i, j] = prev.scores[i, prev.class_order.index(c)]
    return out


class FusePseudoTestCase(SimpleTestCase):
    """Tests that:
        * background takes the smaller of the two maps
        * new classes come from the localizer, old ones from the old model
        * random maps match a per-pixel branch evaluation
        * column order of the inputs does not matter
        * mismatched class sets are rejected
        * the backward pass matches finite differences
    """

    def setUp(self):
        rng = np.random.default_rng(0)
        self.loc = ScoreMap(CTX.all_classes, random_probabilities(rng, 6, 5))
        self.prev = ScoreMap(CTX.old_classes, random_probabilities(rng, 6, 3))

    def test_background_min(self):
        loc = ScoreMap(CTX.all_classes, np.array([[0.2, 0.1, 0.1, 0.3, 0.3]]))
        prev = ScoreMap(CTX.old_classes, np.array([[0.9, 0.05, 0.05]]))
        fused = fuse_pseudo(loc, prev, CTX)
        self.assertEqual(fused.scores[0, 0], 0.2)

    def test_branches(self):
        fused = fuse_pseudo(self.loc, self.prev, CTX)
        self.assertTrue(np.array_equal(fused.scores[:, 3:], self.loc.scores[:, 3:]))
        self.assertTrue(np.array_equal(fused.scores[:, 1:3], self.prev.scores[:, 1:3]))
        self.assertEqual(fused.class_order, CTX.all_classes)

    def test_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            loc = ScoreMap(CTX.all_classes, rng.uniform(size=(9, 5)))
            prev = ScoreMap(CTX.old_classes, rng.uniform(size=(9, 3)))
            fused = fuse_pseudo(loc, prev, CTX)
            self.assertTrue(np.array_equal(fused.scores, oracle_fuse(loc, prev, CTX)))
            self.assertTrue(np.all((fused.scores >= 0) & (fused.scores <= 1)))

    def test_column_order(self):
        shuffled = self.loc.select(('tv', 'cat', 'background', 'sofa', 'dog'))
        self.assertTrue(np.array_equal(fuse_pseudo(shuffled, self.prev, CTX).scores,
                                       fuse_pseudo(self.loc, self.prev, CTX).scores))

    def test_mismatch(self):
        with self.assertRaises(ClassSetMismatchError):
            fuse_pseudo(self.loc.select(CTX.old_classes), self.prev, CTX)
        with self.assertRaises(ClassSetMismatchError):
            fuse_pseudo(self.loc, self.prev.select(('background', 'dog')), CTX)

    def test_backward(self):
        rng = np.random.default_rng(2)
        weights = rng.normal(size=(6, 5))
        scores = self.loc.scores.copy()

        def objective():
            loc = ScoreMap(CTX.all_classes, scores)
            return float(np.sum(fuse_pseudo(loc, self.prev, CTX).scores * weights))

        analytic = fuse_pseudo_backward(self.loc, self.prev, CTX, weights)
        assert_grad_close(self, analytic, numeric_grad(objective, scores))


class StepContextTestCase(SimpleTestCase):
    def test_background_required(self):
        with self.assertRaises(ClassSetMismatchError):
            StepContext(old_classes=('dog',), new_classes=('cat',))

    def test_disjoint(self):
        with self.assertRaises(ClassSetMismatchError):
            StepContext(old_classes=('background', 'dog'), new_classes=('dog',))


class ImageLabelFromPixelTestCase(SimpleTestCase):
    """Tests that a class is present iff it wins the argmax somewhere"""
    classes = ('background', 'dog', 'cat')

    def test_three_dog_pixels(self):
        scores = np.array([[0.8, 0.1, 0.1]] * 5 + [[0.1, 0.8, 0.1]] * 3)
        label = image_label_from_pixel(ScoreMap(self.classes, scores))
        self.assertEqual(label.positives, ['background', 'dog'])
        self.assertEqual(label.bit('dog'), 1)

    def test_background_only(self):
        scores = np.tile([0.6, 0.2, 0.2], (10, 1))
        label = image_label_from_pixel(ScoreMap(self.classes, scores))
        self.assertEqual(label.positives, ['background'])

    def test_min_pixels(self):
        scores = np.array([[0.8, 0.1, 0.1]] * 5 + [[0.1, 0.8, 0.1]] * 3)
        label = image_label_from_pixel(ScoreMap(self.classes, scores), min_pixels=4)
        self.assertEqual(label.positives, ['background'])

    def test_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            scores = rng.uniform(size=(12, 3))
            label = image_label_from_pixel(ScoreMap(self.classes, scores))
            present = set()
            for row in scores:
                best = 0
                for j in range(1, 3):
                    if row[j] > row[best]:
                        best = j
                present.add(self.classes[best])
            self.assertEqual(set(label.positives), present)
