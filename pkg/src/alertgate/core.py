"""Domain types shared across the package.

Frames and events are immutable values. Class ids are 1-based and class 1
is always the non-alerting Normal class; the rest of the package relies on
that convention rather than on class names.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

NUM_CLASSES = 17
NORMAL = 1
SIMPLEX_TOL = 1e-6

CLASS_NAMES: dict[int, str] = {
    1: "Normal (Safe driving)",
    2: "Phone - Talk Left",
    3: "Phone - Talk Right",
    4: "Phone - Text Left",
    5: "Phone - Text Right",
    6: "Eating",
    7: "Drinking",
    8: "Smoking Right",
    9: "Smoking Left",
    10: "Reaching Behind",
    11: "Look Left",
    12: "Look Down",
    13: "Talking to Passengers / Look Right",
    14: "Makeup / Hand on Hair",
    15: "Control Panel / GPS",
    16: "Yawning",
    17: "Sleep / Eyes Closed",
}


class AlertGateError(ValueError):
    """Base class for data errors raised by this package."""


class NotASimplex(AlertGateError):
    pass


class OutOfRange(AlertGateError):
    pass


class WrongArity(AlertGateError):
    pass


class NonMonotonicTime(AlertGateError):
    pass


class InvalidConfig(AlertGateError):
    pass


@dataclass(frozen=True)
class BehaviorClass:
    id: int
    name: str

    def __post_init__(self) -> None:
        if CLASS_NAMES.get(self.id) != self.name:
            raise InvalidConfig(f"unknown behavior class {self.id}: {self.name!r}")

    @property
    def is_normal(self) -> bool:
        return self.id == NORMAL


TAXONOMY: tuple[BehaviorClass, ...] = tuple(
    BehaviorClass(cid, name) for cid, name in CLASS_NAMES.items()
)


@dataclass(frozen=True)
class ProbabilityFrame:
    """Class probabilities for frame ``t``; ``probs[i]`` belongs to class ``i + 1``."""

    t: int
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.probs, tuple):
            object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))

    def prob(self, class_id: int) -> float:
        return self.probs[class_id - 1]

    def argmax(self) -> int:
        """Top class id; ties go to the lowest id."""
        return argmax_class(self.probs)

    def to_dict(self) -> dict:
        return {"t": self.t, "probs": list(self.probs)}

    @classmethod
    def from_dict(cls, d: dict) -> "ProbabilityFrame":
        return cls(int(d["t"]), tuple(float(p) for p in d["probs"]))


@dataclass(frozen=True)
class LabeledFrame:
    t: int
    label: int

    def __post_init__(self) -> None:
        if not 1 <= self.label <= NUM_CLASSES:
            raise OutOfRange(f"label {self.label} at t={self.t} not in 1..{NUM_CLASSES}")

    def to_dict(self) -> dict:
        return {"t": self.t, "label": self.label}

    @classmethod
    def from_dict(cls, d: dict) -> "LabeledFrame":
        return cls(int(d["t"]), int(d["label"]))


@dataclass(frozen=True)
class AlertEvent:
    """A detected behavior over the closed frame interval ``[t_start, t_end]``."""

    class_id: int
    t_start: int
    t_end: int

    def __post_init__(self) -> None:
        if self.t_start > self.t_end:
            raise InvalidConfig(f"event start {self.t_start} after end {self.t_end}")
        if self.class_id == NORMAL:
            raise InvalidConfig("events are never emitted for the Normal class")
        if self.class_id < 1:
            raise InvalidConfig(f"bad class id {self.class_id}")

    @property
    def length(self) -> int:
        return self.t_end - self.t_start + 1

    def to_dict(self) -> dict:
        return {"class_id": self.class_id, "t_start": self.t_start, "t_end": self.t_end}

    @classmethod
    def from_dict(cls, d: dict) -> "AlertEvent":
        return cls(int(d["class_id"]), int(d["t_start"]), int(d["t_end"]))


@dataclass(frozen=True)
class GateConfig:
    """Operating point of the temporal decision head.

    ``k`` and ``m`` are counted in frames; ``cooldown`` is the number of
    frames after a release during which the released class cannot re-trigger.
    """

    tau: float = 0.75
    k: int = 25
    tau_off: float = 0.60
    m: int = 3
    cooldown: int = 0

    def __post_init__(self) -> None:
        if not (0.0 < self.tau <= 1.0):
            raise InvalidConfig(f"tau must be in (0, 1], got {self.tau}")
        if self.k < 1:
            raise InvalidConfig(f"k must be >= 1, got {self.k}")
        if not (0.0 < self.tau_off <= self.tau):
            raise InvalidConfig(f"tau_off must be in (0, tau], got {self.tau_off}")
        if self.tau_off == self.tau and self.k != 1:
            raise InvalidConfig("tau_off == tau is only allowed in frame-only mode (k == 1)")
        if self.m < 1:
            raise InvalidConfig(f"m must be >= 1, got {self.m}")
        if self.cooldown < 0:
            raise InvalidConfig(f"cooldown must be >= 0, got {self.cooldown}")


@dataclass(frozen=True)
class FrameRate:
    fps: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.fps) and self.fps > 0):
            raise InvalidConfig(f"fps must be finite and positive, got {self.fps}")

    @property
    def period(self) -> float:
        return 1.0 / self.fps


def argmax_class(probs) -> int:
    best = 0
    best_p = probs[0]
    for i in range(1, len(probs)):
        if probs[i] > best_p:
            best, best_p = i, probs[i]
    return best + 1


def validate_frame(frame: ProbabilityFrame, num_classes: int = NUM_CLASSES) -> ProbabilityFrame:
    """Return ``frame`` unchanged if it is a valid probability vector.

    ``num_classes`` exists for frames produced by a class map, which have
    one entry per target category instead of the 17 source classes.
    """
    if len(frame.probs) != num_classes:
        raise WrongArity(f"t={frame.t}: expected {num_classes} probabilities, got {len(frame.probs)}")
    if frame.t < 0:
        raise OutOfRange(f"negative frame index {frame.t}")
    for p in frame.probs:
        if not (0.0 <= p <= 1.0):
            raise OutOfRange(f"t={frame.t}: probability {p} outside [0, 1]")
    total = math.fsum(frame.probs)
    if abs(total - 1.0) > SIMPLEX_TOL:
        raise NotASimplex(f"t={frame.t}: probabilities sum to {total}")
    return frame


def persistence_window_seconds(k: int, rate: FrameRate | float) -> float:
    """Wall-clock length of a ``k``-frame persistence window."""
    if k < 1:
        raise InvalidConfig(f"k must be >= 1, got {k}")
    fps = rate.fps if isinstance(rate, FrameRate) else FrameRate(float(rate)).fps
    return float(Fraction(k) / Fraction(fps))
