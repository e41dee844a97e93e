"""Streaming alert gating and event-level evaluation for per-frame behavior classifiers."""

from .core import (
    CLASS_NAMES,
    NORMAL,
    NUM_CLASSES,
    AlertEvent,
    AlertGateError,
    FrameRate,
    GateConfig,
    LabeledFrame,
    ProbabilityFrame,
    persistence_window_seconds,
    validate_frame,
)
from .gate import TemporalGate, gate_finalize, gate_step, run_gate

__version__ = "0.1.0"
