"""Event-level evaluation: reference events, tIoU matching, alert metrics.

Intervals are closed frame ranges, so a single-frame event has length 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .core import NORMAL, AlertEvent, AlertGateError, FrameRate, LabeledFrame

DEFAULT_ETA = 0.3


class NonContiguousLabels(AlertGateError):
    pass


class ZeroDuration(AlertGateError):
    pass


class NoGtEvents(AlertGateError):
    pass


@dataclass
class MatchResult:
    matches: list[tuple[int, int, float]] = field(default_factory=list)
    unmatched_pred: list[int] = field(default_factory=list)
    unmatched_gt: list[int] = field(default_factory=list)


@dataclass
class EventMetrics:
    false_alerts_per_min: float
    mean_time_to_detect: float | None
    fragmentation: float | None
    matched: int
    unmatched_pred: int
    unmatched_gt: int


def gt_events_from_labels(labels: Sequence[LabeledFrame]) -> list[AlertEvent]:
    """Turn each maximal run of one non-Normal label into a reference event."""
    events = []
    cur, start, prev_t = NORMAL, None, None
    for lf in labels:
        if prev_t is not None and lf.t != prev_t + 1:
            raise NonContiguousLabels(f"label t={lf.t} does not follow t={prev_t}")
        if lf.label != cur:
            if cur != NORMAL:
                events.append(AlertEvent(cur, start, prev_t))
            cur, start = lf.label, lf.t
        prev_t = lf.t
    if cur != NORMAL:
        events.append(AlertEvent(cur, start, prev_t))
    return events


def tiou(a: AlertEvent, b: AlertEvent) -> float:
    inter = min(a.t_end, b.t_end) - max(a.t_start, b.t_start) + 1
    if inter <= 0:
        return 0.0
    union = a.length + b.length - inter
    return inter / union


def greedy_match(pred: Sequence[AlertEvent], gt: Sequence[AlertEvent], eta: float = DEFAULT_ETA) -> MatchResult:
    """One-to-one same-class matching, best tIoU first.

    Ties on tIoU go to the earlier GT start, then the earlier predicted start.
    """
    if not (0.0 < eta <= 1.0):
        raise ValueError(f"eta must be in (0, 1], got {eta}")
    cands = []
    for i, p in enumerate(pred):
        for j, g in enumerate(gt):
            if p.class_id != g.class_id:
                continue
            iou = tiou(p, g)
            if iou >= eta:
                cands.append((-iou, g.t_start, p.t_start, j, i, iou))
    cands.sort()
    used_p, used_g = set(), set()
    result = MatchResult()
    for *_, j, i, iou in cands:
        if i in used_p or j in used_g:
            continue
        used_p.add(i)
        used_g.add(j)
        result.matches.append((i, j, iou))
    result.unmatched_pred = [i for i in range(len(pred)) if i not in used_p]
    result.unmatched_gt = [j for j in range(len(gt)) if j not in used_g]
    return result


def false_alerts_per_min(result: MatchResult, duration_frames: int, rate: FrameRate | float) -> float:
    if duration_frames <= 0:
        raise ZeroDuration("evaluated duration must be positive")
    fps = rate.fps if isinstance(rate, FrameRate) else FrameRate(float(rate)).fps
    minutes = duration_frames / fps / 60.0
    return len(result.unmatched_pred) / minutes


def time_to_detect(
    result: MatchResult, pred: Sequence[AlertEvent], gt: Sequence[AlertEvent]
) -> tuple[list[int], float | None]:
    """Signed onset delay per match (pred start minus GT start) and its mean.

    The mean is None when nothing matched.
    """
    delays = [pred[i].t_start - gt[j].t_start for i, j, _ in result.matches]
    if not delays:
        return [], None
    return delays, math.fsum(delays) / len(delays)


def fragmentation(pred: Sequence[AlertEvent], gt: Sequence[AlertEvent]) -> float:
    """Mean number of same-class predicted segments touching each GT event."""
    if not gt:
        raise NoGtEvents("fragmentation is undefined without reference events")
    counts = []
    for g in gt:
        counts.append(
            sum(1 for p in pred if p.class_id == g.class_id and p.t_start <= g.t_end and g.t_start <= p.t_end)
        )
    return sum(counts) / len(counts)


def evaluate_events(
    pred: Sequence[AlertEvent],
    gt: Sequence[AlertEvent],
    duration_frames: int,
    rate: FrameRate | float,
    eta: float = DEFAULT_ETA,
) -> tuple[EventMetrics, MatchResult]:
    result = greedy_match(pred, gt, eta)
    _, mean_ttd = time_to_detect(result, pred, gt)
    frag = fragmentation(pred, gt) if gt else None
    metrics = EventMetrics(
        false_alerts_per_min=false_alerts_per_min(result, duration_frames, rate),
        mean_time_to_detect=mean_ttd,
        fragmentation=frag,
        matched=len(result.matches),
        unmatched_pred=len(result.unmatched_pred),
        unmatched_gt=len(result.unmatched_gt),
    )
    return metrics, result
