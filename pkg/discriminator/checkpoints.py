"""
Checkpoint layout (little-endian):

    magic  b'WDSC'
    u16    format version
    u32    header length, followed by a UTF-8 JSON header
           {layer_dims, grid_size, side, domain}
    f64[]  per layer: weights row-major, then biases
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from discriminator.exceptions import CheckpointError, DimensionMismatchError
from discriminator.types import MlpModel


MAGIC = b'WDSC'
VERSION = 1
PREFIX = struct.Struct('<4sHI')
FLOAT = np.dtype('<f8')


@dataclass(frozen=True)
class FeatureSpec:
    """How features fed to a checkpointed model were produced"""
    grid_size: int
    side: int = 224
    domain: str = 'amplitude'


def dump_model(m: MlpModel, spec: FeatureSpec) -> bytes:
    if m.input_dim != spec.grid_size ** 2:
        raise DimensionMismatchError(
            f'model input {m.input_dim} does not match grid size {spec.grid_size}'
        )
    header = json.dumps({
        'layer_dims': list(m.layer_dims),
        'grid_size': spec.grid_size,
        'side': spec.side,
        'domain': spec.domain,
    }, sort_keys=True).encode('utf-8')
    chunks = [PREFIX.pack(MAGIC, VERSION, len(header)), header]
    for w, b in zip(m.weights, m.biases):
        chunks.append(w.astype(FLOAT).tobytes(order='C'))
        chunks.append(b.astype(FLOAT).tobytes(order='C'))
    return b''.join(chunks)


def parse_model(raw: bytes) -> tuple[MlpModel, FeatureSpec]:
    if len(raw) < PREFIX.size:
        raise CheckpointError('checkpoint is truncated')
    magic, version, header_len = PREFIX.unpack_from(raw)
    if magic != MAGIC:
        raise CheckpointError(f'not a discriminator checkpoint (magic {magic!r})')
    if version != VERSION:
        raise CheckpointError(f'unsupported checkpoint version {version}')
    try:
        header = json.loads(raw[PREFIX.size:PREFIX.size + header_len])
        dims = tuple(int(d) for d in header['layer_dims'])
        spec = FeatureSpec(int(header['grid_size']), int(header['side']),
                           str(header['domain']))
    except (ValueError, KeyError, TypeError) as e:
        raise CheckpointError(f'bad checkpoint header: {e}') from e

    if dims[0] != spec.grid_size ** 2:
        raise DimensionMismatchError(
            f'checkpoint input {dims[0]} does not match grid size {spec.grid_size}'
        )
    start = PREFIX.size + header_len
    if start > len(raw) or (len(raw) - start) % FLOAT.itemsize:
        raise CheckpointError('checkpoint payload is truncated')
    payload = np.frombuffer(raw, dtype=FLOAT, offset=start)
    expected = sum(i * o + o for i, o in zip(dims[:-1], dims[1:]))
    if payload.size != expected:
        raise DimensionMismatchError(
            f'checkpoint holds {payload.size} parameters, dims need {expected}'
        )

    weights, biases = [], []
    offset = 0
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(payload[offset:offset + fan_in * fan_out]
                       .reshape(fan_in, fan_out).astype(np.float64))
        offset += fan_in * fan_out
        biases.append(payload[offset:offset + fan_out].astype(np.float64))
        offset += fan_out
    return MlpModel(dims, weights, biases), spec


def save_model(m: MlpModel, spec: FeatureSpec, path) -> None:
    Path(path).write_bytes(dump_model(m, spec))


def load_model(path, expected: FeatureSpec | None = None) -> tuple[MlpModel, FeatureSpec]:
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise CheckpointError(f'cannot read checkpoint {path}: {e}') from e
    model, spec = parse_model(raw)
    if expected is not None and spec != expected:
        raise DimensionMismatchError(
            f'checkpoint features {spec} differ from requested {expected}'
        )
    return model, spec
