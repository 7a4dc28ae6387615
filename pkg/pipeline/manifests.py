"""JSONL output manifests: one row per line, keys sorted, stable bytes."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence, TypeVar

import dataclass_factory

from pipeline.exceptions import TrainingManifestError
from pipeline.serializers import RehearsalRowSerializer, TrainingRowSerializer
from pipeline.types import RehearsalRow, TrainingRow
from websource.serializers import first_error


Row = TypeVar('Row', TrainingRow, RehearsalRow)

_factory = dataclass_factory.Factory()

_SERIALIZERS = {
    TrainingRow: TrainingRowSerializer,
    RehearsalRow: RehearsalRowSerializer,
}


def dump_rows(rows: Sequence[Row]) -> str:
    return ''.join(
        json.dumps(_factory.dump(row), ensure_ascii=False, sort_keys=True) + '\n'
        for row in rows
    )


def write_rows(rows: Sequence[Row], path) -> None:
    Path(path).write_text(dump_rows(rows), encoding='utf-8')


def read_rows(path, row_type: type[Row]) -> list[Row]:
    try:
        lines = Path(path).read_text(encoding='utf-8').splitlines()
    except OSError as e:
        raise TrainingManifestError(f'cannot read manifest {path}: {e}') from e
    rows = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as e:
            raise TrainingManifestError(f'{path}:{lineno}: invalid JSON: {e.msg}')
        serializer = _SERIALIZERS[row_type](data=data)
        if not serializer.is_valid():
            raise TrainingManifestError(f'{path}:{lineno}: {first_error(serializer.errors)}')
        rows.append(_factory.load(dict(serializer.validated_data), row_type))
    return rows
