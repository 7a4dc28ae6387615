from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from imaging.exceptions import InvalidGridError


@dataclass(frozen=True)
class RasterImage:
    """RGB pixels as a (height, width, 3) array of intensities in [0, 1]"""
    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3 or self.data.shape[2] != 3:
            raise InvalidGridError(
                f'expected (height, width, 3) pixels, got {self.data.shape}'
            )
        if self.data.size and (self.data.min() < 0 or self.data.max() > 1):
            raise InvalidGridError('pixel intensities must lie in [0, 1]')

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return 3


@dataclass(frozen=True)
class GrayGrid:
    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 2:
            raise InvalidGridError(f'expected a 2D grid, got {self.data.shape}')

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class ComplexGrid:
    """Spectrum bins, indexed [v, u] (row frequency first)"""
    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 2:
            raise InvalidGridError(f'expected a 2D grid, got {self.data.shape}')

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class SpectrumFeature:
    grid_size: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.grid_size ** 2,):
            raise InvalidGridError(
                f'feature of grid size {self.grid_size} must hold '
                f'{self.grid_size ** 2} values, got {self.values.shape}'
            )
        if not np.all(np.isfinite(self.values)):
            raise InvalidGridError('feature values must be finite')

    def __len__(self):
        return self.values.shape[0]
