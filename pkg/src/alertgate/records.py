"""JSON Lines and CSV readers/writers for frames, labels, events and timings."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Callable, Iterable, TypeVar

from .core import AlertEvent, AlertGateError, LabeledFrame, ProbabilityFrame
from .profiling import StageTiming

T = TypeVar("T")

EVENT_COLUMNS = ["class_id", "t_start", "t_end"]


class ParseError(AlertGateError):
    def __init__(self, path, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.path = path
        self.lineno = lineno


def read_jsonl(path: str | Path, build: Callable[[dict], T]) -> list[T]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(build(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(path, lineno, f"{type(exc).__name__}: {exc}") from None
    return out


def dumps_jsonl(items: Iterable) -> str:
    return "".join(json.dumps(it.to_dict(), separators=(",", ":")) + "\n" for it in items)


def write_jsonl(path: str | Path, items: Iterable) -> None:
    Path(path).write_text(dumps_jsonl(items), encoding="utf-8", newline="")


def read_frames(path) -> list[ProbabilityFrame]:
    return read_jsonl(path, ProbabilityFrame.from_dict)


def read_labels(path) -> list[LabeledFrame]:
    return read_jsonl(path, LabeledFrame.from_dict)


def read_timings(path) -> list[StageTiming]:
    return read_jsonl(path, StageTiming.from_dict)


def read_events(path) -> list[AlertEvent]:
    """Events from JSONL, or from CSV when the file name ends in ``.csv``."""
    if str(path).endswith(".csv"):
        with open(path, encoding="utf-8", newline="") as fh:
            out = []
            for lineno, row in enumerate(csv.DictReader(fh), 2):
                try:
                    out.append(AlertEvent.from_dict(row))
                except (KeyError, TypeError, ValueError) as exc:
                    raise ParseError(path, lineno, f"{type(exc).__name__}: {exc}") from None
            return out
    return read_jsonl(path, AlertEvent.from_dict)


def csv_text(rows: Iterable[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\r\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in columns})
    return buf.getvalue()


def write_csv(path: str | Path, rows: Iterable[dict], columns: list[str]) -> None:
    Path(path).write_text(csv_text(rows, columns), encoding="utf-8", newline="")


def write_events(path: str | Path, events: Iterable[AlertEvent]) -> None:
    if str(path).endswith(".csv"):
        write_csv(path, (e.to_dict() for e in events), EVENT_COLUMNS)
    else:
        write_jsonl(path, events)
