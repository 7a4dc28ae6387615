from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from discriminator.exceptions import InvalidLayerDimsError, InvalidTrainConfigError


SCORE_FLOOR = 1e-12


@dataclass
class MlpModel:
    """
    Fully connected network, ReLU on hidden layers and softmax on the
    two outputs: index 0 is p_ds (dataset), index 1 is p_web.
    weights[k] has shape (layer_dims[k], layer_dims[k + 1]).
    """
    layer_dims: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        self.layer_dims = tuple(int(d) for d in self.layer_dims)
        if len(self.layer_dims) < 2 or self.layer_dims[-1] != 2:
            raise InvalidLayerDimsError(
                f'need at least two layers ending in 2 outputs, got {self.layer_dims}'
            )
        expected = list(zip(self.layer_dims[:-1], self.layer_dims[1:]))
        if [w.shape for w in self.weights] != expected \
                or [b.shape for b in self.biases] != [(d,) for _, d in expected]:
            raise InvalidLayerDimsError('parameter shapes do not match layer_dims')

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    def copy(self) -> MlpModel:
        return MlpModel(
            self.layer_dims,
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
        )

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.weights + self.biases)


@dataclass
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 10
    batch_size: int = 24
    seed: int = 0
    shuffle: bool = True
    # stop after the first epoch reaching this training accuracy
    target_accuracy: float | None = None

    def __post_init__(self):
        if self.epochs < 1:
            raise InvalidTrainConfigError('epochs must be at least 1')
        if self.batch_size < 1:
            raise InvalidTrainConfigError('batch_size must be at least 1')
        if self.learning_rate < 0:
            raise InvalidTrainConfigError('learning_rate must be non-negative')
        if self.target_accuracy is not None \
                and not 0 < self.target_accuracy <= 1:
            raise InvalidTrainConfigError('target_accuracy must lie in (0, 1]')


@dataclass(frozen=True)
class GateDecision:
    p_ds: float
    p_web: float
    accepted: bool
    score: float

    @classmethod
    def from_probabilities(cls, p_ds: float, p_web: float) -> GateDecision:
        return cls(
            p_ds=p_ds,
            p_web=p_web,
            accepted=p_ds > p_web,
            score=p_ds / max(p_web, SCORE_FLOOR),
        )


@dataclass
class TrainingHistory:
    accuracies: list[float] = field(default_factory=list)
    losses: list[float] = field(default_factory=list)
    stopped_early: bool = False
