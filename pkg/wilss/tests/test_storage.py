import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from wilss.exceptions import MapFormatError
from wilss.storage import dump_map, load_map, parse_map, save_map
from wilss.types import FeatureMap, ScoreMap


class MapStorageTestCase(SimpleTestCase):
    """Tests that:
        * score and feature maps load back exactly, flags included
        * foreign and truncated files are rejected
        * the payload is little-endian float64 after the header
    """

    def setUp(self):
        rng = np.random.default_rng(0)
        self.scores = ScoreMap(('background', 'dog'), rng.uniform(size=(4, 2)))
        self.logits = ScoreMap(('background', 'dog'), rng.normal(size=(4, 2)), is_logits=True)
        self.features = FeatureMap(rng.normal(size=(4, 8)))

    def test_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            for m in (self.scores, self.logits, self.features):
                path = Path(tmp) / 'map.bin'
                save_map(m, path)
                loaded = load_map(path)
                self.assertEqual(type(loaded), type(m))
                if isinstance(m, ScoreMap):
                    self.assertEqual(loaded.class_order, m.class_order)
                    self.assertEqual(loaded.is_logits, m.is_logits)
                    self.assertTrue(np.array_equal(loaded.scores, m.scores))
                else:
                    self.assertTrue(np.array_equal(loaded.vectors, m.vectors))

    def test_payload_layout(self):
        raw = dump_map(self.scores)
        tail = np.frombuffer(raw[-16:], dtype='<f8')
        self.assertTrue(np.array_equal(tail, self.scores.scores[-1]))

    def test_rejects(self):
        raw = dump_map(self.scores)
        for bad in (raw[:3], b'XXXX' + raw[4:], raw[:-1], raw + b'\0' * 8):
            with self.assertRaises(MapFormatError):
                parse_map(bad)

