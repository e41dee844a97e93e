"""Comparison alert policies without a persistence requirement.

All three turn a stream into per-frame alert classes and then merge runs of
consecutive frames with the same non-Normal class into events.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import NORMAL, AlertEvent, InvalidConfig, NonMonotonicTime, ProbabilityFrame, argmax_class


@dataclass(frozen=True)
class MajorityConfig:
    w: int = 15

    def __post_init__(self) -> None:
        if self.w < 1:
            raise InvalidConfig(f"majority window must be >= 1, got {self.w}")


@dataclass(frozen=True)
class EmaConfig:
    lam: float = 0.8
    tau: float = 0.75

    def __post_init__(self) -> None:
        if not (0.0 <= self.lam < 1.0):
            raise InvalidConfig(f"EMA factor must be in [0, 1), got {self.lam}")
        if not (0.0 < self.tau <= 1.0):
            raise InvalidConfig(f"EMA threshold must be in (0, 1], got {self.tau}")


def _check_order(frames: Sequence[ProbabilityFrame]) -> None:
    for prev, cur in zip(frames, frames[1:]):
        if cur.t <= prev.t:
            raise NonMonotonicTime(f"frame t={cur.t} does not follow t={prev.t}")


def merge_alert_frames(ts: Iterable[int], classes: Iterable[int]) -> list[AlertEvent]:
    """Collapse per-frame alert classes into events.

    Consecutive entries (in sequence order) with the same non-Normal class
    form one event; Normal entries break runs and produce nothing.
    """
    events = []
    cur_cls = NORMAL
    start = end = None
    for t, c in zip(ts, classes):
        if c == cur_cls and c != NORMAL:
            end = t
            continue
        if cur_cls != NORMAL:
            events.append(AlertEvent(cur_cls, start, end))
        cur_cls, start, end = c, t, t
    if cur_cls != NORMAL:
        events.append(AlertEvent(cur_cls, start, end))
    return events


def frame_only_alerts(frames: Sequence[ProbabilityFrame]) -> list[AlertEvent]:
    frames = list(frames)
    _check_order(frames)
    return merge_alert_frames((f.t for f in frames), (argmax_class(f.probs) for f in frames))


def majority_vote_alerts(frames: Sequence[ProbabilityFrame], cfg: MajorityConfig | None = None) -> list[AlertEvent]:
    """Sliding-window vote over hard labels.

    The window is truncated at the stream start. The output class is the
    unique most-voted label; if two or more labels share the top count the
    previous output is kept (Normal before the first frame).
    """
    cfg = cfg or MajorityConfig()
    frames = list(frames)
    _check_order(frames)
    window: deque[int] = deque()
    votes: Counter[int] = Counter()
    out = []
    prev = NORMAL
    for f in frames:
        y = argmax_class(f.probs)
        window.append(y)
        votes[y] += 1
        if len(window) > cfg.w:
            old = window.popleft()
            votes[old] -= 1
            if votes[old] == 0:
                del votes[old]
        ranked = votes.most_common(2)
        if len(ranked) == 1 or ranked[0][1] > ranked[1][1]:
            prev = ranked[0][0]
        out.append(prev)
    return merge_alert_frames((f.t for f in frames), out)


def ema_probabilities(frames: Sequence[ProbabilityFrame], lam: float) -> list[list[float]]:
    """Smoothed probability vectors, seeded with the first observation."""
    smoothed = []
    cur = None
    for f in frames:
        if cur is None:
            cur = list(f.probs)
        else:
            cur = [lam * a + (1.0 - lam) * b for a, b in zip(cur, f.probs)]
        smoothed.append(cur)
    return smoothed


def ema_alerts(frames: Sequence[ProbabilityFrame], cfg: EmaConfig | None = None) -> list[AlertEvent]:
    cfg = cfg or EmaConfig()
    frames = list(frames)
    _check_order(frames)
    classes = []
    for p in ema_probabilities(frames, cfg.lam):
        c = argmax_class(p)
        classes.append(c if p[c - 1] >= cfg.tau else NORMAL)
    return merge_alert_frames((f.t for f in frames), classes)
