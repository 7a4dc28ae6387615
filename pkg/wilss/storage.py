"""
Score and feature map files (little-endian):

    magic  b'WMAP'
    u16    format version
    u32    header length, followed by a UTF-8 JSON header
           {kind, pixels, classes | dim, is_logits}
    f64[]  row-major payload, one row per pixel
"""
from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Union

import numpy as np

from wilss.exceptions import InvalidMapError, MapFormatError
from wilss.types import FeatureMap, ScoreMap


MAGIC = b'WMAP'
VERSION = 1
PREFIX = struct.Struct('<4sHI')
FLOAT = np.dtype('<f8')

SCORES, FEATURES = 'scores', 'features'

AnyMap = Union[ScoreMap, FeatureMap]


def dump_map(m: AnyMap) -> bytes:
    if isinstance(m, ScoreMap):
        header = {'kind': SCORES, 'pixels': m.num_pixels,
                  'classes': list(m.class_order), 'is_logits': m.is_logits}
        data = m.scores
    else:
        header = {'kind': FEATURES, 'pixels': m.num_pixels, 'dim': m.dim}
        data = m.vectors
    raw_header = json.dumps(header, sort_keys=True).encode('utf-8')
    return b''.join([
        PREFIX.pack(MAGIC, VERSION, len(raw_header)),
        raw_header,
        np.ascontiguousarray(data, dtype=FLOAT).tobytes(),
    ])


def parse_map(raw: bytes) -> AnyMap:
    if len(raw) < PREFIX.size:
        raise MapFormatError('map file is truncated')
    magic, version, header_len = PREFIX.unpack_from(raw)
    if magic != MAGIC:
        raise MapFormatError(f'not a map file (magic {magic!r})')
    if version != VERSION:
        raise MapFormatError(f'unsupported map version {version}')
    try:
        header = json.loads(raw[PREFIX.size:PREFIX.size + header_len])
        kind = header['kind']
        pixels = int(header['pixels'])
        width = len(header['classes']) if kind == SCORES else int(header['dim'])
    except (ValueError, KeyError, TypeError) as e:
        raise MapFormatError(f'bad map header: {e}') from e

    start = PREFIX.size + header_len
    if len(raw) - start != pixels * width * FLOAT.itemsize:
        raise MapFormatError(
            f'payload holds {len(raw) - start} bytes, header needs '
            f'{pixels * width * FLOAT.itemsize}'
        )
    data = np.frombuffer(raw, dtype=FLOAT, offset=start).reshape(pixels, width)
    data = data.astype(np.float64)
    try:
        if kind == SCORES:
            return ScoreMap(tuple(header['classes']), data, bool(header.get('is_logits')))
        if kind == FEATURES:
            return FeatureMap(data)
    except InvalidMapError as e:
        raise MapFormatError(f'invalid map contents: {e}') from e
    raise MapFormatError(f'unknown map kind `{kind}`')


def save_map(m: AnyMap, path) -> None:
    Path(path).write_bytes(dump_map(m))


def load_map(path) -> AnyMap:
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise MapFormatError(f'cannot read map {path}: {e}') from e
    return parse_map(raw)
