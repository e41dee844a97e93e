"""Composition of mapping, alert policy and evaluation used by the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .baselines import EmaConfig, MajorityConfig, ema_alerts, frame_only_alerts, majority_vote_alerts
from .core import NUM_CLASSES, AlertEvent, FrameRate, GateConfig, InvalidConfig, LabeledFrame, ProbabilityFrame, validate_frame
from .events import DEFAULT_ETA, EventMetrics, MatchResult, evaluate_events, greedy_match, gt_events_from_labels
from .frame_metrics import frame_metrics
from .gate import run_gate
from .mapping import ClassMap, apply_map_events, apply_map_frames, apply_map_labels, no_confounders_map
from .simulate import StreamSpec, scenario_suite, simulate_stream

VARIANTS = ("gate", "frame_only", "majority", "ema")

ABLATION_VARIANTS = (
    # (row label, confounder classes kept, temporal head on)
    ("No confounders + no temporal head", False, False),
    ("Confounders only", True, False),
    ("Temporal head only", False, True),
    ("Confounders + temporal head (full)", True, True),
)


@dataclass(frozen=True)
class RunConfig:
    variant: str = "gate"
    gate: GateConfig = field(default_factory=GateConfig)
    majority: MajorityConfig = field(default_factory=MajorityConfig)
    ema: EmaConfig = field(default_factory=EmaConfig)
    map_file: str | None = None
    eta: float = DEFAULT_ETA
    fps: FrameRate = field(default_factory=lambda: FrameRate(25.0))

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise InvalidConfig(f"unknown variant {self.variant!r}; choose from {', '.join(VARIANTS)}")
        if not (0.0 < self.eta <= 1.0):
            raise InvalidConfig(f"eta must be in (0, 1], got {self.eta}")

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        kw = {}
        try:
            if "variant" in d:
                kw["variant"] = d["variant"]
            if "gate" in d:
                kw["gate"] = GateConfig(**d["gate"])
            if "majority" in d:
                kw["majority"] = MajorityConfig(**d["majority"])
            if "ema" in d:
                e = dict(d["ema"])
                if "lambda" in e:
                    e["lam"] = e.pop("lambda")
                kw["ema"] = EmaConfig(**e)
            if "map_file" in d:
                kw["map_file"] = d["map_file"]
            if "eta" in d:
                kw["eta"] = float(d["eta"])
            if "fps" in d:
                kw["fps"] = FrameRate(float(d["fps"]))
            return cls(**kw)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidConfig):
                raise
            raise InvalidConfig(f"bad run config: {exc}") from None


def alert_events(frames: Sequence[ProbabilityFrame], cfg: RunConfig) -> list[AlertEvent]:
    if cfg.variant == "gate":
        return run_gate(frames, cfg.gate)
    if cfg.variant == "frame_only":
        return frame_only_alerts(frames)
    if cfg.variant == "majority":
        return majority_vote_alerts(frames, cfg.majority)
    return ema_alerts(frames, cfg.ema)


def run_pipeline(
    frames: Sequence[ProbabilityFrame],
    cfg: RunConfig,
    frame_map: ClassMap | None = None,
    event_map: ClassMap | None = None,
) -> list[AlertEvent]:
    """Validate, optionally map frames, apply the alert policy, optionally map events."""
    for f in frames:
        validate_frame(f, NUM_CLASSES)
    if frame_map is not None:
        frames = apply_map_frames(frames, frame_map)
    events = alert_events(frames, cfg)
    if event_map is not None:
        events = apply_map_events(events, event_map)
    return events


def evaluate_run(
    pred: Sequence[AlertEvent],
    labels: Sequence[LabeledFrame],
    fps: FrameRate | float,
    eta: float = DEFAULT_ETA,
    cmap: ClassMap | None = None,
    map_target: str = "both",
) -> tuple[EventMetrics, MatchResult, list[AlertEvent], list[AlertEvent]]:
    """Score predicted events against frame labels.

    ``map_target`` chooses which side ``cmap`` is applied to: ``both``,
    ``gt`` or ``pred``.
    """
    if map_target not in ("both", "gt", "pred"):
        raise InvalidConfig(f"map_target must be both, gt or pred, got {map_target!r}")
    pred = list(pred)
    if cmap is not None and map_target in ("both", "gt"):
        labels = apply_map_labels(labels, cmap)
    if cmap is not None and map_target in ("both", "pred"):
        pred = apply_map_events(pred, cmap)
    gt = gt_events_from_labels(labels)
    metrics, result = evaluate_events(pred, gt, len(labels), fps, eta)
    return metrics, result, pred, gt


@dataclass
class AblationRow:
    variant: str
    macro_f1: float
    false_alerts_per_min: float

    def to_dict(self) -> dict:
        return {"variant": self.variant, "macro_f1": self.macro_f1, "false_alerts_per_min": self.false_alerts_per_min}


def ablation_grid(
    specs: Sequence[StreamSpec],
    gate_cfg: GateConfig | None = None,
    eta: float = DEFAULT_ETA,
) -> list[AblationRow]:
    """{confounder classes on/off} x {temporal head on/off}, pooled over ``specs``.

    Switching confounders off absorbs the confounder classes into their
    look-alikes on the prediction side only: the reference labels still say
    the driver was grooming or using the console, which is what a classifier
    trained without those classes gets wrong. With the temporal head off,
    alerts come from the frame-only policy (persistence of one frame).
    """
    gate_cfg = gate_cfg or GateConfig()
    streams = [(spec, *simulate_stream(spec)) for spec in specs]
    nc_map = no_confounders_map()
    rows = []
    for label, confounders, temporal in ABLATION_VARIANTS:
        hard_pred: list[int] = []
        hard_gt: list[int] = []
        unmatched = 0
        minutes = 0.0
        for spec, labels, frames in streams:
            pred_frames = frames if confounders else apply_map_frames(frames, nc_map)
            hard_pred.extend(f.argmax() for f in pred_frames)
            hard_gt.extend(lf.label for lf in labels)
            events = run_gate(pred_frames, gate_cfg) if temporal else frame_only_alerts(pred_frames)
            result = greedy_match(events, gt_events_from_labels(labels), eta)
            unmatched += len(result.unmatched_pred)
            minutes += len(labels) / spec.fps / 60.0
        rows.append(AblationRow(label, frame_metrics(hard_pred, hard_gt).macro_f1, unmatched / minutes))
    return rows


def suite_specs(scenario: str, seed: int, fps: float = 25.0) -> list[StreamSpec]:
    suite = scenario_suite(seed, fps)
    if scenario == "all":
        return suite
    chosen = [s for s in suite if s.name == scenario]
    if not chosen:
        raise InvalidConfig(f"unknown scenario {scenario!r}")
    return chosen

