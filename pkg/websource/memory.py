"""
Caption memory: what survives of the step-0 data for rehearsal. The file
is JSONL with one `{"classes": [...], "caption": "..."}` object per line.
"""
from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

import dataclass_factory

from webwilss.exceptions import CuratorError
from websource.backends import WebBackend, query_backend
from websource.captions import CaptionProvider, caption_of
from websource.exceptions import EmptyMemoryError, MalformedManifestError
from websource.serializers import MemoryEntrySerializer, first_error
from websource.types import (
    CaptionMemory,
    CrawlBudget,
    MemoryEntry,
    QueryFailure,
    RehearsalQueryResult,
    WebRecord,
)


logger = logging.getLogger(__name__)

_factory = dataclass_factory.Factory(schemas={
    MemoryEntry: dataclass_factory.Schema(only=['classes', 'caption']),
})


def _fan_out(fn, items, workers: int) -> list:
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


def build_caption_memory(step0_records: Sequence[WebRecord], provider: CaptionProvider,
                         workers: int = 1) -> CaptionMemory:
    def entry(rec: WebRecord) -> MemoryEntry:
        return MemoryEntry(tuple(rec.classes), caption_of(provider, rec).text)

    memory = CaptionMemory(_fan_out(entry, step0_records, workers))
    logger.info('caption memory holds %d entries', len(memory))
    return memory


def dump_memory(memory: CaptionMemory) -> str:
    lines = [
        json.dumps(_factory.dump(entry), ensure_ascii=False, sort_keys=True)
        for entry in memory.entries
    ]
    return ''.join(line + '\n' for line in lines)


def save_memory(memory: CaptionMemory, path) -> None:
    Path(path).write_text(dump_memory(memory), encoding='utf-8')


def load_memory(path) -> CaptionMemory:
    try:
        lines = Path(path).read_text(encoding='utf-8').splitlines()
    except OSError as e:
        raise MalformedManifestError(f'cannot read caption memory: {e}', path) from e
    entries = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as e:
            raise MalformedManifestError(f'invalid JSON: {e.msg}', path, lineno)
        serializer = MemoryEntrySerializer(data=row)
        if not serializer.is_valid():
            raise MalformedManifestError(first_error(serializer.errors), path, lineno)
        if set(row) - {'classes', 'caption'}:
            raise MalformedManifestError(
                f'unexpected fields {sorted(set(row) - {"classes", "caption"})}',
                path, lineno,
            )
        data = serializer.validated_data
        entries.append(MemoryEntry(tuple(data['classes']), data['caption']))
    return CaptionMemory(entries)


def rehearsal_query(memory: CaptionMemory, backend: WebBackend,
                    budget: CrawlBudget = CrawlBudget(),
                    workers: int = 1) -> RehearsalQueryResult:
    """
    Query the backend with every stored caption, per_caption records each.
    Records keep the tags of the first caption that found them; a failing
    caption is reported and the others go on.
    """
    if not memory.entries:
        raise EmptyMemoryError('caption memory is empty')

    def run(entry: MemoryEntry):
        try:
            return query_backend(backend, entry.caption, budget.per_caption), None
        except CuratorError as e:
            logger.warning('rehearsal query %r failed: %s', entry.caption, e)
            return [], QueryFailure(entry.caption, str(e))

    result = RehearsalQueryResult()
    seen = set()
    for entry, (records, failure) in zip(memory.entries,
                                         _fan_out(run, memory.entries, workers)):
        if failure is not None:
            result.failures.append(failure)
        for rec in records:
            if rec.source_id in seen:
                continue
            seen.add(rec.source_id)
            result.records.append(WebRecord(
                rec.source_id, rec.image_ref, entry.caption, None,
                rec.keywords, entry.classes,
            ))
    logger.info('rehearsal query: %d records from %d captions, %d failures',
                len(result.records), len(memory), len(result.failures))
    return result
