import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from discriminator.checkpoints import (
    FeatureSpec,
    dump_model,
    load_model,
    parse_model,
    save_model,
)
from discriminator.exceptions import CheckpointError, DimensionMismatchError
from discriminator.mlp import init_model


class CheckpointTestCase(SimpleTestCase):
    """Tests that:
        * a saved model loads back bit-for-bit with its feature spec
        * dumping the same model twice gives identical bytes
        * foreign, truncated or mismatched checkpoints are rejected
    """

    def setUp(self):
        self.model = init_model([4, 3, 2], seed=5)
        self.spec = FeatureSpec(grid_size=2, side=16)
        self.tmp = tempfile.TemporaryDirectory()
        self.path = Path(self.tmp.name) / 'disc.ckpt'

    def tearDown(self):
        self.tmp.cleanup()

    def test_round_trip(self):
        save_model(self.model, self.spec, self.path)
        model, spec = load_model(self.path, expected=self.spec)
        self.assertEqual(spec, self.spec)
        self.assertEqual(model.layer_dims, self.model.layer_dims)
        for a, b in zip(model.weights + model.biases,
                        self.model.weights + self.model.biases):
            self.assertTrue(np.array_equal(a, b))

    def test_stable_bytes(self):
        self.assertEqual(dump_model(self.model, self.spec),
                         dump_model(self.model.copy(), self.spec))

    def test_bad_magic(self):
        raw = b'XXXX' + dump_model(self.model, self.spec)[4:]
        with self.assertRaises(CheckpointError):
            parse_model(raw)

    def test_truncated(self):
        raw = dump_model(self.model, self.spec)
        with self.assertRaises(CheckpointError):
            parse_model(raw[:5])
        with self.assertRaises((CheckpointError, DimensionMismatchError)):
            parse_model(raw[:-3])
        with self.assertRaises(DimensionMismatchError):
            parse_model(raw[:-8])

    def test_grid_mismatch_on_dump(self):
        with self.assertRaises(DimensionMismatchError):
            dump_model(self.model, FeatureSpec(grid_size=3))

    def test_expected_spec_mismatch(self):
        save_model(self.model, self.spec, self.path)
        with self.assertRaises(DimensionMismatchError):
            load_model(self.path, expected=FeatureSpec(grid_size=2, side=224))

    def test_missing_file(self):
        with self.assertRaises(CheckpointError):
            load_model(self.path)
