"""Per-stage latency accounting and tail statistics.

All values are milliseconds. Percentiles (median included) use the
nearest-rank order statistic, so every reported value is an observed sample.
"""

from __future__ import annotations

import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .core import AlertGateError, FrameRate, GateConfig, persistence_window_seconds

STAGES = ("cap_ms", "pre_ms", "inf_ms", "post_ms", "io_ms")
STAGE_LABELS = {
    "cap_ms": "Capture + decode",
    "pre_ms": "Preprocess",
    "inf_ms": "Inference",
    "post_ms": "Postprocess",
    "io_ms": "Overlay / I/O",
}


class EmptyLog(AlertGateError):
    pass


@dataclass(frozen=True)
class StageTiming:
    t: int
    cap_ms: float = 0.0
    pre_ms: float = 0.0
    inf_ms: float = 0.0
    post_ms: float = 0.0
    io_ms: float = 0.0

    def __post_init__(self) -> None:
        for name in STAGES:
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"t={self.t}: {name} must be finite and >= 0, got {v}")

    def to_dict(self) -> dict:
        return {"t": self.t, **{s: getattr(self, s) for s in STAGES}}

    @classmethod
    def from_dict(cls, d: dict) -> "StageTiming":
        return cls(int(d["t"]), *(float(d.get(s, 0.0)) for s in STAGES))


@dataclass(frozen=True)
class Summary:
    mean: float
    median: float
    p95: float


@dataclass(frozen=True)
class TimingReport:
    stages: dict[str, Summary]
    e2e: Summary
    fps: float
    jitter_ms: float
    n: int


def e2e_latency(rec: StageTiming) -> float:
    return rec.cap_ms + rec.pre_ms + rec.inf_ms + rec.post_ms + rec.io_ms


def nearest_rank(sorted_values: Sequence[float], q: float) -> float:
    """The ``ceil(q * n)``-th smallest value (1-based), for ``0 < q <= 1``."""
    n = len(sorted_values)
    if n == 0:
        raise EmptyLog("no samples")
    rank = max(1, math.ceil(q * n))
    return sorted_values[rank - 1]


def summarize(values: Sequence[float]) -> Summary:
    s = sorted(values)
    return Summary(math.fsum(s) / len(s), nearest_rank(s, 0.5), nearest_rank(s, 0.95))


def aggregate(records: Sequence[StageTiming]) -> TimingReport:
    if not records:
        raise EmptyLog("timing log is empty")
    stages = {name: summarize([getattr(r, name) for r in records]) for name in STAGES}
    e2e = summarize([e2e_latency(r) for r in records])
    fps = 1000.0 / e2e.median if e2e.median > 0 else math.inf
    return TimingReport(stages, e2e, fps, e2e.p95 - e2e.median, len(records))


def effective_window_report(cfg: GateConfig, report: TimingReport) -> float:
    """Seconds covered by the persistence window at the measured frame rate."""
    return persistence_window_seconds(cfg.k, FrameRate(report.fps))


def format_table(report: TimingReport) -> str:
    rows = [("Stage", "mean", "median", "p95")]
    for name in STAGES:
        s = report.stages[name]
        rows.append((STAGE_LABELS[name], f"{s.mean:g}", f"{s.median:g}", f"{s.p95:g}"))
    rows.append(("Total", f"{report.e2e.mean:g}", f"{report.e2e.median:g}", f"{report.e2e.p95:g}"))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = []
    for k, r in enumerate(rows):
        lines.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths))))
        if k == 0 or k == len(rows) - 2:
            lines.append("-" * len(lines[-1]))
    lines.append(f"FPS {report.fps:g}  jitter(p95-median) {report.jitter_ms:g} ms  n={report.n}")
    return "\n".join(lines)


def report_rows(report: TimingReport) -> list[dict]:
    rows = []
    for name in STAGES:
        s = report.stages[name]
        rows.append({"stage": STAGE_LABELS[name], "mean_ms": s.mean, "median_ms": s.median, "p95_ms": s.p95})
    rows.append({"stage": "Total", "mean_ms": report.e2e.mean, "median_ms": report.e2e.median, "p95_ms": report.e2e.p95})
    return rows


@dataclass
class StageRecorder:
    """In-process stopwatch that produces :class:`StageTiming` records.

    Uses the monotonic ``perf_counter_ns`` clock::

        rec = StageRecorder()
        with rec.frame(t):
            with rec.stage("inf_ms"):
                run_model()
    """

    records: list[StageTiming] = field(default_factory=list)
    _current: dict | None = None

    @contextmanager
    def frame(self, t: int) -> Iterator[None]:
        self._current = {"t": t}
        try:
            yield
        finally:
            self.records.append(StageTiming(**self._current))
            self._current = None

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        if name not in STAGES:
            raise ValueError(f"unknown stage {name!r}")
        if self._current is None:
            raise RuntimeError("stage() must be used inside frame()")
        start = time.perf_counter_ns()
        try:
            yield
        finally:
            elapsed = (time.perf_counter_ns() - start) / 1e6
            self._current[name] = self._current.get(name, 0.0) + elapsed

    def report(self) -> TimingReport:
        return aggregate(self.records)
