"""Synthetic images, manifests and plans for the pipeline tests."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from pipeline.types import StepPlan
from websource.types import CaptionMemory, MemoryEntry


def write_ppm(path, pixels: np.ndarray) -> Path:
    """Binary P6 with maxval 255 from (height, width, 3) intensities in [0, 1]"""
    data = np.clip(np.rint(pixels * 255), 0, 255).astype(np.uint8)
    h, w, _ = data.shape
    path = Path(path)
    path.write_bytes(f'P6\n{w} {h}\n255\n'.encode('ascii') + data.tobytes())
    return path


def smooth_image(rng: np.random.Generator, side: int = 32) -> np.ndarray:
    """Linear colour ramp in a random direction: energy near the zero frequency"""
    rows, cols = np.meshgrid(np.linspace(0, 1, side), np.linspace(0, 1, side), indexing='ij')
    angle = rng.uniform(0, 2 * np.pi)
    ramp = 0.5 + 0.5 * (np.cos(angle) * rows + np.sin(angle) * cols) / np.sqrt(2)
    tint = rng.uniform(0.6, 1.0, 3)
    return np.clip(ramp[..., None] * tint, 0, 1)


def busy_image(rng: np.random.Generator, side: int = 32) -> np.ndarray:
    """Checkerboard under uniform noise: energy spread to high frequencies"""
    cell = int(rng.integers(1, 3))
    rows, cols = np.indices((side, side))
    checker = ((rows // cell + cols // cell) % 2).astype(float)
    noisy = 0.6 * checker + 0.4 * rng.uniform(0, 1, (side, side))
    return np.repeat(noisy[..., None], 3, axis=2)


def blob_image(rng: np.random.Generator, color, side: int = 8) -> np.ndarray:
    """Dark background with one coloured square"""
    img = rng.uniform(0.0, 0.15, (side, side, 3))
    r0, c0 = rng.integers(0, side // 2, 2)
    img[r0:r0 + side // 2, c0:c0 + side // 2] = color
    return img


def write_manifest(path, rows) -> Path:
    path = Path(path)
    path.write_text(''.join(json.dumps(row, sort_keys=True) + '\n' for row in rows))
    return path


def write_image_manifest(directory, name: str, images, keywords=(), classes=(),
                         captions=None) -> Path:
    """Images to `<name>-<i>.ppm` plus a manifest listing them"""
    directory = Path(directory)
    rows = []
    for i, pixels in enumerate(images):
        file = f'{name}-{i:03d}.ppm'
        write_ppm(directory / file, pixels)
        row = {'id': f'{name}-{i:03d}', 'file': file, 'keywords': list(keywords),
               'classes': list(classes)}
        if captions is not None:
            row['caption'] = captions[i % len(captions)]
        rows.append(row)
    return write_manifest(directory / f'{name}.jsonl', rows)


def discriminator_corpus(directory, n: int = 50, side: int = 32, seed: int = 0):
    """(dataset manifest, web manifest): smooth images vs busy images"""
    rng = np.random.default_rng(seed)
    dataset = write_image_manifest(directory, 'dataset',
                                   [smooth_image(rng, side) for _ in range(n)])
    web = write_image_manifest(directory, 'web',
                               [busy_image(rng, side) for _ in range(n)])
    return dataset, web


COLORS = {
    'cat': (0.9, 0.2, 0.2),
    'dog': (0.2, 0.9, 0.2),
    'horse': (0.2, 0.2, 0.9),
    'person': (0.9, 0.9, 0.2),
}


def web_world(directory, seed: int = 0) -> Path:
    """
    Web manifest for the toy-3-1 universe. Of the eight `person` records,
    ids person-000..003 are captioned with a person and a horse, the other
    four with a cat only. Old-class records carry captions close to the
    step-0 memory; `dog-002` and `dog-003` come back with a caption
    without indexed nouns.
    """
    rng = np.random.default_rng(seed)
    directory = Path(directory)
    rows = []

    def add(record_id, class_name, keywords, caption):
        file = f'{record_id}.ppm'
        write_ppm(directory / file, blob_image(rng, COLORS[class_name]))
        rows.append({'id': record_id, 'file': file, 'keywords': keywords,
                     'caption': caption})

    for i in range(8):
        caption = 'a person riding a horse' if i < 4 else 'a cat on a sofa'
        add(f'person-{i:03d}', 'person', ['person', 'people'], caption)
    for i in range(4):
        add(f'cat-{i:03d}', 'cat', ['cat', 'sofa'], 'a cat sleeping on a sofa')
    for i in range(4):
        caption = 'a dog running on grass' if i < 2 else 'running quickly'
        add(f'dog-{i:03d}', 'dog', ['dog', 'grass'], caption)
    for i in range(3):
        add(f'horse-{i:03d}', 'horse', ['horse', 'field'], 'a horse in a field')
    return write_manifest(directory / 'web.jsonl', rows)


def toy_memory() -> CaptionMemory:
    return CaptionMemory([
        MemoryEntry(('cat',), 'a cat sleeping on a sofa'),
        MemoryEntry(('dog',), 'a dog running on grass'),
        MemoryEntry(('horse',), 'a horse in a field'),
    ])


def toy_plan(**overrides) -> StepPlan:
    values = dict(
        protocol='toy-3-1',
        step=1,
        old_classes=('cat', 'dog', 'horse'),
        new_classes=('person',),
        per_class_crawl=40,
        per_class_keep=12,
        per_caption=4,
        rehearsal_per_class=6,
        use_discriminator=False,
    )
    values.update(overrides)
    return StepPlan(**values)
