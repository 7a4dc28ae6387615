import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from websource.backends import ManifestBackend, WebBackend
from websource.captions import ManifestCaptionProvider
from websource.exceptions import (
    BackendUnavailableError,
    EmptyMemoryError,
    MalformedManifestError,
)
from websource.memory import (
    build_caption_memory,
    dump_memory,
    load_memory,
    rehearsal_query,
    save_memory,
)
from websource.types import CaptionMemory, CrawlBudget, MemoryEntry, WebRecord


class FlakyBackend(WebBackend):
    def __init__(self, inner, failing):
        self.inner = inner
        self.failing = failing

    def query(self, q, limit):
        if q in self.failing:
            raise BackendUnavailableError('timeout')
        return self.inner.query(q, limit)


STEP0 = [
    WebRecord('s1', '/i/s1', classes=('dog', 'person')),
    WebRecord('s2', '/i/s2', classes=('cat',)),
    WebRecord('s3', '/i/s3', classes=('dog',)),
]
CAPTIONS = {'s1': 'a man walking a dog', 's2': 'a cat on a sofa', 's3': 'a dog on grass'}


class BuildMemoryTestCase(SimpleTestCase):
    def test_build(self):
        memory = build_caption_memory(STEP0, ManifestCaptionProvider(CAPTIONS))
        self.assertEqual(memory.entries, [
            MemoryEntry(('dog', 'person'), 'a man walking a dog'),
            MemoryEntry(('cat',), 'a cat on a sofa'),
            MemoryEntry(('dog',), 'a dog on grass'),
        ])

    def test_threaded_matches_serial(self):
        provider = ManifestCaptionProvider(CAPTIONS)
        self.assertEqual(build_caption_memory(STEP0, provider, workers=4).entries,
                         build_caption_memory(STEP0, provider, workers=1).entries)


class MemoryFileTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.path = Path(self.tmp.name) / 'memory.jsonl'

    def test_save_load(self):
        memory = CaptionMemory([
            MemoryEntry(('dog', 'person'), 'a man walking a dog'),
            MemoryEntry((), ''),
        ])
        save_memory(memory, self.path)
        self.assertEqual(load_memory(self.path).entries, memory.entries)

    def test_one_object_per_line(self):
        text = dump_memory(CaptionMemory([MemoryEntry(('cat',), 'a cat')]))
        self.assertEqual(text, '{"caption": "a cat", "classes": ["cat"]}\n')

    def test_malformed(self):
        self.path.write_text('{"classes": ["cat"], "caption": "a cat"}\n{"classes": "cat"}\n')
        with self.assertRaises(MalformedManifestError) as ctx:
            load_memory(self.path)
        self.assertEqual(ctx.exception.line, 2)

    def test_extra_field(self):
        self.path.write_text('{"classes": [], "caption": "x", "pixels": [1]}\n')
        with self.assertRaises(MalformedManifestError):
            load_memory(self.path)

    def test_missing(self):
        with self.assertRaises(MalformedManifestError):
            load_memory(self.path)


class RehearsalQueryTestCase(SimpleTestCase):
    """Tests that rehearsal querying:
        * tags each record with the classes of the caption that found it
        * keeps the first caption's tags for a record found twice
        * caps results per caption
        * reports failing captions and goes on with the rest
    """

    def setUp(self):
        self.backend = ManifestBackend([
            WebRecord('w1', '/w/1', keywords=('dog', 'grass')),
            WebRecord('w2', '/w/2', keywords=('man', 'dog')),
            WebRecord('w3', '/w/3', keywords=('cat', 'sofa')),
            WebRecord('w4', '/w/4', keywords=('sofa',)),
        ])
        self.memory = CaptionMemory([
            MemoryEntry(('dog', 'person'), 'man dog'),
            MemoryEntry(('dog',), 'dog grass'),
            MemoryEntry(('cat',), 'cat sofa'),
        ])

    def test_tags(self):
        result = rehearsal_query(self.memory, self.backend, CrawlBudget(per_caption=5))
        tags = {r.source_id: r.classes for r in result.records}
        self.assertEqual(tags, {
            'w2': ('dog', 'person'),
            'w1': ('dog', 'person'),
            'w3': ('cat',),
            'w4': ('cat',),
        })
        self.assertEqual(result.failures, [])

    def test_unique_ids(self):
        result = rehearsal_query(self.memory, self.backend, CrawlBudget(per_caption=5))
        ids = [r.source_id for r in result.records]
        self.assertEqual(len(ids), len(set(ids)))

    def test_per_caption_cap(self):
        result = rehearsal_query(self.memory, self.backend, CrawlBudget(per_caption=1))
        self.assertEqual([r.source_id for r in result.records], ['w2', 'w1', 'w3'])

    def test_failures_collected(self):
        backend = FlakyBackend(self.backend, failing={'dog grass'})
        result = rehearsal_query(self.memory, backend, CrawlBudget(per_caption=5), workers=3)
        self.assertEqual([f.caption for f in result.failures], ['dog grass'])
        self.assertEqual({r.source_id for r in result.records}, {'w1', 'w2', 'w3', 'w4'})

    def test_empty_memory(self):
        with self.assertRaises(EmptyMemoryError):
            rehearsal_query(CaptionMemory(), self.backend)
