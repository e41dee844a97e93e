"""Frame-level recognition metrics over hard labels."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .core import AlertGateError


class LengthMismatch(AlertGateError):
    pass


@dataclass
class FrameMetrics:
    macro_f1: float
    balanced_accuracy: float
    per_class_f1: dict[int, float]


def frame_metrics(pred: Sequence[int], gt: Sequence[int]) -> FrameMetrics:
    """Macro-F1 and balanced accuracy averaged over the classes present in ``gt``.

    Classes that only ever appear in ``pred`` still get a per-class F1 (of 0)
    but are left out of both means.
    """
    if len(pred) != len(gt):
        raise LengthMismatch(f"{len(pred)} predictions vs {len(gt)} labels")
    tp: Counter[int] = Counter()
    n_pred = Counter(pred)
    n_gt = Counter(gt)
    for p, g in zip(pred, gt):
        if p == g:
            tp[p] += 1
    per_class = {}
    for c in sorted(set(n_pred) | set(n_gt)):
        denom = n_pred[c] + n_gt[c]
        per_class[c] = 2 * tp[c] / denom if denom else 0.0
    present = sorted(n_gt)
    if not present:
        return FrameMetrics(0.0, 0.0, per_class)
    macro = sum(per_class[c] for c in present) / len(present)
    bal = sum(tp[c] / n_gt[c] for c in present) / len(present)
    return FrameMetrics(macro, bal, per_class)
