"""Reference math for class-imbalanced training: capped weights and focal loss."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import NUM_CLASSES, AlertGateError

DEFAULT_GAMMA = 1.5
DEFAULT_CAP = 10.0


class ZeroCount(AlertGateError):
    pass


class DegenerateProbability(AlertGateError):
    pass


@dataclass(frozen=True)
class ClassWeights:
    alpha: tuple[float, ...]
    cap: float

    def __post_init__(self) -> None:
        if any(not (0.0 < a <= self.cap) for a in self.alpha):
            raise ValueError("class weights must lie in (0, cap]")


def class_weights(counts: Sequence[int], cap: float = DEFAULT_CAP) -> ClassWeights:
    """``alpha_c = min(cap, N / (C * n_c))``: 1.0 for every class when balanced."""
    if cap <= 0:
        raise ValueError(f"cap must be positive, got {cap}")
    if len(counts) != NUM_CLASSES:
        raise ValueError(f"expected {NUM_CLASSES} counts, got {len(counts)}")
    if any(n < 1 for n in counts):
        raise ZeroCount("every class needs at least one sample")
    total = sum(counts)
    c = len(counts)
    return ClassWeights(tuple(min(cap, total / (c * n)) for n in counts), cap)


def focal_loss(p_true: float, alpha_true: float = 1.0, gamma: float = DEFAULT_GAMMA) -> float:
    if not (0.0 < p_true <= 1.0):
        raise DegenerateProbability(f"p_true must be in (0, 1], got {p_true}")
    if p_true == 1.0:
        return 0.0
    return -alpha_true * (1.0 - p_true) ** gamma * math.log(p_true)


def focal_loss_grad(p_true: float, alpha_true: float = 1.0, gamma: float = DEFAULT_GAMMA) -> float:
    """Derivative of :func:`focal_loss` with respect to ``p_true``."""
    if not (0.0 < p_true < 1.0):
        raise DegenerateProbability(f"gradient needs p_true in (0, 1), got {p_true}")
    q = 1.0 - p_true
    return alpha_true * (gamma * q ** (gamma - 1.0) * math.log(p_true) - q**gamma / p_true)
