"""Temporal decision head: persistence trigger, hysteresis release, cooldown.

Per frame ``t`` the gate does, in order:

1. If an event for class ``c`` is open and ``p_t(c) < tau_off``, extend the
   release run; on the ``m``-th consecutive such frame the event closes with
   ``t_end = t - m`` and the gate enters cooldown for ``c``.
2. If no event is open, open one for class ``c != Normal`` when ``c`` has been
   the argmax with ``p >= tau`` on each of the last ``k`` frames, unless ``c``
   is the class currently cooling down. The event is backdated to the first
   frame of that window, but never before the previous event's end + 1.
3. A cooldown that was already running counts down by one frame.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .core import (
    NORMAL,
    AlertEvent,
    GateConfig,
    NonMonotonicTime,
    ProbabilityFrame,
    argmax_class,
    validate_frame,
)


class Mode(Enum):
    IDLE = "idle"
    ACTIVE = "active"
    COOLDOWN = "cooldown"


@dataclass
class GateState:
    mode: Mode = Mode.IDLE
    # class of the open event (ACTIVE) or the suppressed class (COOLDOWN)
    class_id: int | None = None
    t_start: int | None = None
    frames_remaining: int = 0
    trigger_class: int | None = None
    trigger_run: int = 0
    release_run: int = 0
    last_t: int | None = None
    last_end: int = -1


def _update_trigger_run(state: GateState, frame: ProbabilityFrame, tau: float, prev_t) -> None:
    c = argmax_class(frame.probs)
    if c != NORMAL and frame.probs[c - 1] >= tau:
        # a missing frame index breaks the window
        if c == state.trigger_class and prev_t == frame.t - 1:
            state.trigger_run += 1
        else:
            state.trigger_class = c
            state.trigger_run = 1
    else:
        state.trigger_class = None
        state.trigger_run = 0


def _step(state: GateState, frame: ProbabilityFrame, cfg: GateConfig) -> AlertEvent | None:
    t = frame.t
    if state.last_t is not None and t <= state.last_t:
        raise NonMonotonicTime(f"frame t={t} does not follow t={state.last_t}")
    _update_trigger_run(state, frame, cfg.tau, state.last_t)
    state.last_t = t

    emitted = None
    fresh_cooldown = False
    if state.mode is Mode.ACTIVE:
        c = state.class_id
        if frame.probs[c - 1] < cfg.tau_off:
            state.release_run += 1
            if state.release_run == cfg.m:
                emitted = AlertEvent(c, state.t_start, t - cfg.m)
                state.last_end = emitted.t_end
                state.release_run = 0
                state.t_start = None
                if cfg.cooldown > 0:
                    state.mode = Mode.COOLDOWN
                    state.frames_remaining = cfg.cooldown
                    fresh_cooldown = True
                else:
                    state.mode = Mode.IDLE
                    state.class_id = None
        else:
            state.release_run = 0

    if state.mode is not Mode.ACTIVE:
        cand = state.trigger_class if state.trigger_run >= cfg.k else None
        suppressed = state.class_id if state.mode is Mode.COOLDOWN else None
        if cand is not None and cand != suppressed:
            state.mode = Mode.ACTIVE
            state.class_id = cand
            state.t_start = max(t - cfg.k + 1, state.last_end + 1)
            state.release_run = 0
            state.frames_remaining = 0
        elif state.mode is Mode.COOLDOWN and not fresh_cooldown:
            state.frames_remaining -= 1
            if state.frames_remaining == 0:
                state.mode = Mode.IDLE
                state.class_id = None
    return emitted


def gate_step(
    state: GateState, frame: ProbabilityFrame, cfg: GateConfig
) -> tuple[GateState, AlertEvent | None]:
    """Pure single step: returns a new state and the event closed at this frame, if any."""
    new = copy.copy(state)
    event = _step(new, frame, cfg)
    return new, event


def gate_finalize(state: GateState, last_t: int | None = None) -> AlertEvent | None:
    """Close an event left open at end of stream."""
    if state.mode is not Mode.ACTIVE:
        return None
    end = state.last_t if last_t is None else last_t
    return AlertEvent(state.class_id, state.t_start, end)


class TemporalGate:
    """Streaming wrapper that owns one :class:`GateState`.

    >>> gate = TemporalGate(GateConfig(k=3, tau_off=0.6, m=2))
    >>> for frame in frames:
    ...     event = gate.push(frame)
    >>> tail = gate.close()
    """

    def __init__(self, cfg: GateConfig | None = None, num_classes: int | None = None):
        self.cfg = cfg or GateConfig()
        self.num_classes = num_classes
        self.state = GateState()

    def push(self, frame: ProbabilityFrame) -> AlertEvent | None:
        if self.num_classes is not None:
            validate_frame(frame, self.num_classes)
        return _step(self.state, frame, self.cfg)

    def close(self) -> AlertEvent | None:
        event = gate_finalize(self.state)
        self.state = GateState(last_t=self.state.last_t, last_end=self.state.last_end)
        return event

    def reset(self) -> None:
        self.state = GateState()


def run_gate(
    frames: Iterable[ProbabilityFrame],
    cfg: GateConfig | None = None,
    num_classes: int | None = None,
) -> list[AlertEvent]:
    """Run the gate over a whole stream and return events sorted by start.

    If ``num_classes`` is given, every frame is validated first and the run
    aborts on the first bad frame.
    """
    gate = TemporalGate(cfg, num_classes)
    events = []
    for frame in frames:
        ev = gate.push(frame)
        if ev is not None:
            events.append(ev)
    tail = gate.close()
    if tail is not None:
        events.append(tail)
    return events


def trigger_frames(frames: Sequence[ProbabilityFrame], tau: float, k: int) -> set[int]:
    """Frame indices ``t`` at which the persistence condition holds for some class.

    This is the condition alone, independent of release and cooldown.
    """
    hits = set()
    run_class, run, prev_t = None, 0, None
    for frame in frames:
        c = argmax_class(frame.probs)
        if c != NORMAL and frame.probs[c - 1] >= tau:
            run = run + 1 if (c == run_class and prev_t == frame.t - 1) else 1
            run_class = c
        else:
            run_class, run = None, 0
        if run >= k:
            hits.add(frame.t)
        prev_t = frame.t
    return hits
