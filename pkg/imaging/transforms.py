from __future__ import annotations

import logging

import numpy as np
from django.db import models

from imaging.exceptions import InvalidGridError
from imaging.types import ComplexGrid, GrayGrid, RasterImage, SpectrumFeature


logger = logging.getLogger(__name__)

# Rec.601 luma weights
GRAY_WEIGHTS = np.array([0.299, 0.587, 0.114])

DEFAULT_SIDE = 224
DEFAULT_GRID_SIZE = 32
VARIANCE_FLOOR = 1e-12


class FeatureDomain(models.TextChoices):
    AMPLITUDE = 'amplitude', 'Fourier amplitude'
    PHASE = 'phase', 'Fourier phase'
    PIXEL = 'pixel', 'grayscale pixels'


def to_grayscale(img: RasterImage) -> GrayGrid:
    return GrayGrid(img.data @ GRAY_WEIGHTS)


def resize_bilinear(g: GrayGrid, h: int, w: int) -> GrayGrid:
    """Bilinear resampling with corner-aligned sample positions"""
    if h < 1 or w < 1:
        raise InvalidGridError(f'cannot resize to {h}x{w}')
    if (h, w) == g.data.shape:
        return GrayGrid(g.data.copy())

    ys = _corner_aligned(g.height, h)
    xs = _corner_aligned(g.width, w)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, g.height - 1)
    x1 = np.minimum(x0 + 1, g.width - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]

    src = g.data
    top = src[y0][:, x0] * (1 - wx) + src[y0][:, x1] * wx
    bottom = src[y1][:, x0] * (1 - wx) + src[y1][:, x1] * wx
    return GrayGrid(top * (1 - wy) + bottom * wy)


def _corner_aligned(src_size: int, dst_size: int) -> np.ndarray:
    if dst_size == 1 or src_size == 1:
        return np.zeros(dst_size)
    return np.arange(dst_size) * ((src_size - 1) / (dst_size - 1))


def dft2(g: GrayGrid) -> ComplexGrid:
    """Unnormalized forward 2D DFT, exp(-2*pi*i*(u*x/W + v*y/H))"""
    return ComplexGrid(np.fft.fft2(g.data))


def amplitude(c: ComplexGrid) -> GrayGrid:
    return GrayGrid(np.abs(c.data))


def phase(c: ComplexGrid) -> GrayGrid:
    return GrayGrid(np.angle(c.data))


def spectrum_features(a: GrayGrid, grid_size: int = DEFAULT_GRID_SIZE) -> SpectrumFeature:
    """
    Fixed adapter from an amplitude spectrum to the discriminator input:
    log1p per bin, DC moved to the grid center, average pooling down to
    grid_size x grid_size, then standardization within the vector.
    """
    if np.any(a.data < 0):
        raise InvalidGridError('amplitude grid must be non-negative')
    shifted = np.fft.fftshift(np.log1p(a.data))
    return SpectrumFeature(grid_size, standardize(pool(shifted, grid_size)))


def image_features(img: RasterImage, side: int = DEFAULT_SIDE,
                   grid_size: int = DEFAULT_GRID_SIZE,
                   domain: str = FeatureDomain.AMPLITUDE) -> SpectrumFeature:
    """Load-to-feature chain: grayscale, resize, transform, adapter"""
    gray = resize_bilinear(to_grayscale(img), side, side)
    if domain == FeatureDomain.AMPLITUDE:
        return spectrum_features(amplitude(dft2(gray)), grid_size)
    if domain == FeatureDomain.PHASE:
        shifted = np.fft.fftshift(phase(dft2(gray)).data)
        return SpectrumFeature(grid_size, standardize(pool(shifted, grid_size)))
    if domain == FeatureDomain.PIXEL:
        return SpectrumFeature(grid_size, standardize(pool(gray.data, grid_size)))
    raise InvalidGridError(f'unknown feature domain `{domain}`')


def pool(grid: np.ndarray, grid_size: int) -> np.ndarray:
    """
    Average pooling onto grid_size x grid_size blocks. Block k covers
    [floor(k*n/g), ceil((k+1)*n/g)), so blocks are exact when n divides
    evenly and never empty otherwise.
    """
    if grid_size < 1:
        raise InvalidGridError(f'grid size must be positive, got {grid_size}')
    row_edges = _block_edges(grid.shape[0], grid_size)
    col_edges = _block_edges(grid.shape[1], grid_size)
    pooled = np.empty((grid_size, grid_size))
    for i, (r0, r1) in enumerate(row_edges):
        for j, (c0, c1) in enumerate(col_edges):
            pooled[i, j] = grid[r0:r1, c0:c1].mean()
    return pooled.ravel()


def _block_edges(n: int, g: int) -> list[tuple[int, int]]:
    return [((k * n) // g, -((-(k + 1) * n) // g)) for k in range(g)]


def standardize(values: np.ndarray) -> np.ndarray:
    centered = values - values.mean()
    variance = np.mean(centered ** 2)
    if variance < VARIANCE_FLOOR:
        return np.zeros_like(values)
    return centered / np.sqrt(variance)
