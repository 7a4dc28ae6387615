from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from discriminator.mlp import forward
from discriminator.types import GateDecision, MlpModel
from imaging.types import SpectrumFeature


logger = logging.getLogger(__name__)


def gate(m: MlpModel, f: SpectrumFeature) -> GateDecision:
    """Accept a sample when p_ds / p_web > 1; an exact tie rejects"""
    p_ds, p_web = forward(m, f)
    return GateDecision.from_probabilities(p_ds, p_web)


def gate_many(m: MlpModel, features: Sequence[SpectrumFeature],
              workers: int = 1) -> list[GateDecision]:
    if workers <= 1:
        return [gate(m, f) for f in features]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(lambda f: gate(m, f), features))


def rank_by_score(items: Sequence, decisions: Sequence[GateDecision]) -> list:
    """Highest score first; equal scores keep their input order"""
    order = sorted(range(len(items)), key=lambda i: -decisions[i].score)
    return [items[i] for i in order]
