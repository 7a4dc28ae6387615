"""
Web backends answer text queries with image records. The manifest backend
stands in for a photo-sharing site: a directory of images described by a
JSONL manifest with fields id, file, keywords, caption and classes.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Iterable

from lexicon.text import split_words
from websource.exceptions import BackendUnavailableError, MalformedManifestError
from websource.serializers import ManifestRecordSerializer, first_error
from websource.types import WebRecord


logger = logging.getLogger(__name__)


class WebBackend:
    def query(self, q: str, limit: int) -> list[WebRecord]:
        raise NotImplementedError


class ManifestBackend(WebBackend):
    def __init__(self, records: Iterable[WebRecord], captions: dict[str, str] | None = None):
        self._records = list(records)
        self._captions = dict(captions or {})
        self._keyword_tokens = {
            rec.source_id: frozenset(t for k in rec.keywords for t in split_words(k))
            for rec in self._records
        }

    @classmethod
    def from_file(cls, path, image_root=None) -> ManifestBackend:
        path = Path(path)
        root = Path(image_root) if image_root is not None else path.parent
        try:
            lines = path.read_text(encoding='utf-8').splitlines()
        except OSError as e:
            raise BackendUnavailableError(f'cannot read manifest {path}: {e}') from e

        records, captions, seen = [], {}, set()
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedManifestError(f'invalid JSON: {e.msg}', path, lineno)
            serializer = ManifestRecordSerializer(data=row)
            if not isinstance(row, dict) or not serializer.is_valid():
                errors = serializer.errors if isinstance(row, dict) else {'row': ['not an object']}
                raise MalformedManifestError(first_error(errors), path, lineno)
            data = serializer.validated_data
            if data['id'] in seen:
                raise MalformedManifestError(f'duplicate id `{data["id"]}`', path, lineno)
            seen.add(data['id'])
            records.append(WebRecord(
                source_id=data['id'],
                image_ref=str(root / data['file']),
                keywords=tuple(data['keywords']),
                classes=tuple(data['classes']),
            ))
            if data.get('caption') is not None:
                captions[data['id']] = data['caption']
        logger.debug('loaded %d manifest records from %s', len(records), path)
        return cls(records, captions)

    @property
    def records(self) -> list[WebRecord]:
        return list(self._records)

    @property
    def captions(self) -> dict[str, str]:
        return dict(self._captions)

    def query(self, q: str, limit: int) -> list[WebRecord]:
        """
        Records sharing at least one token with the query, most shared
        tokens first, then by source_id.
        """
        wanted = set(split_words(q))
        scored = []
        for rec in self._records:
            overlap = len(wanted & self._keyword_tokens[rec.source_id])
            if overlap:
                scored.append((-overlap, rec.source_id, rec))
        scored.sort(key=lambda item: item[:2])
        return [
            WebRecord(rec.source_id, rec.image_ref, q, None, rec.keywords, rec.classes)
            for _, _, rec in scored[:max(limit, 0)]
        ]


def query_backend(backend: WebBackend, q: str, limit: int) -> list[WebRecord]:
    records = backend.query(q, limit)
    logger.debug('query %r: %d records', q, len(records))
    return records
