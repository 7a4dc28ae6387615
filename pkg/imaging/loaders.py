"""
Image decoding: Netpbm (P2, P3, P5, P6) is parsed here, PNG goes through
Pillow when the PNG switch is on.
"""
from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from imaging.exceptions import (
    MalformedHeaderError,
    UnreadableImageError,
    UnsupportedBitDepthError,
    UnsupportedFormatError,
)
from imaging.types import RasterImage


logger = logging.getLogger(__name__)

PNG_SIGNATURE = b'\x89PNG\r\n\x1a\n'

NETPBM_MAGIC = {
    b'P2': (1, False),
    b'P3': (3, False),
    b'P5': (1, True),
    b'P6': (3, True),
}

MAX_MAXVAL = 65535
WHITESPACE = b' \t\n\r\v\f'


def load_image(path, png_enabled: bool = True) -> RasterImage:
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise UnreadableImageError(f'cannot read image {path}: {e}') from e

    if raw[:2] in NETPBM_MAGIC:
        return decode_netpbm(raw)
    if raw.startswith(PNG_SIGNATURE):
        if not png_enabled:
            raise UnsupportedFormatError(f'PNG support is switched off: {path}')
        return _decode_png(path)
    if len(raw) < 2:
        raise MalformedHeaderError(f'file too short to hold a header: {path}')
    raise UnsupportedFormatError(f'unrecognized image format: {path}')


def decode_netpbm(raw: bytes) -> RasterImage:
    magic = raw[:2]
    if magic not in NETPBM_MAGIC:
        raise MalformedHeaderError(f'bad magic number {magic!r}')
    channels, is_binary = NETPBM_MAGIC[magic]

    tokens, offset = _read_header_tokens(raw, 2, count=3)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise MalformedHeaderError(f'non-numeric header fields {tokens}')
    if width < 1 or height < 1:
        raise MalformedHeaderError(f'bad image size {width}x{height}')
    if not 0 < maxval <= MAX_MAXVAL:
        raise UnsupportedBitDepthError(f'maxval {maxval} is outside 1..65535')

    sample_count = width * height * channels
    if is_binary:
        # exactly one whitespace byte separates the header from the raster
        offset += 1
        samples = _read_binary_samples(raw, offset, sample_count, maxval)
    else:
        samples = _read_plain_samples(raw, offset, sample_count)

    if samples.max(initial=0) > maxval:
        raise MalformedHeaderError(f'sample exceeds declared maxval {maxval}')

    pixels = samples.astype(np.float64).reshape(height, width, channels) / maxval
    if channels == 1:
        pixels = np.repeat(pixels, 3, axis=2)
    return RasterImage(pixels)


def _read_header_tokens(raw: bytes, offset: int, count: int):
    tokens = []
    size = len(raw)
    while len(tokens) < count:
        while offset < size and raw[offset] in WHITESPACE:
            offset += 1
        if offset < size and raw[offset:offset + 1] == b'#':
            while offset < size and raw[offset] not in b'\r\n':
                offset += 1
            continue
        if offset >= size:
            raise MalformedHeaderError('truncated header')
        start = offset
        while offset < size and raw[offset] not in WHITESPACE \
                and raw[offset:offset + 1] != b'#':
            offset += 1
        tokens.append(raw[start:offset].decode('ascii', errors='replace'))
    if offset >= size:
        raise MalformedHeaderError('header is not followed by pixel data')
    return tokens, offset


def _read_binary_samples(raw: bytes, offset: int,
                         count: int, maxval: int) -> np.ndarray:
    dtype = np.dtype('>u2') if maxval > 255 else np.dtype('u1')
    needed = count * dtype.itemsize
    payload = raw[offset:offset + needed]
    if len(payload) < needed:
        raise MalformedHeaderError(
            f'truncated raster: {len(payload)} of {needed} bytes present'
        )
    return np.frombuffer(payload, dtype=dtype).astype(np.int64)


def _read_plain_samples(raw: bytes, offset: int, count: int) -> np.ndarray:
    body = raw[offset:]
    # comments may appear between plain samples too
    lines = [line.split(b'#', 1)[0] for line in body.splitlines()]
    fields = b' '.join(lines).split()
    if len(fields) < count:
        raise MalformedHeaderError(
            f'truncated raster: {len(fields)} of {count} samples present'
        )
    try:
        return np.array([int(f) for f in fields[:count]], dtype=np.int64)
    except ValueError:
        raise MalformedHeaderError('non-numeric sample in plain raster')


def _decode_png(path) -> RasterImage:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as img:
            img.load()
            if img.mode in ('I;16', 'I;16B', 'I'):
                pixels = np.asarray(img, dtype=np.float64) / 65535.0
                pixels = np.repeat(pixels[:, :, None], 3, axis=2)
            else:
                pixels = np.asarray(img.convert('RGB'), dtype=np.float64) / 255.0
    except (OSError, UnidentifiedImageError) as e:
        raise MalformedHeaderError(f'cannot decode PNG {path}: {e}') from e
    logger.debug('decoded PNG %s (%dx%d)', path, pixels.shape[1], pixels.shape[0])
    return RasterImage(np.clip(pixels, 0.0, 1.0))

