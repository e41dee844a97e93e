"""Seeded synthetic labeled probability streams with injected disturbances.

Random numbers come from numpy's PCG64 bit generator. The top-level seed
is split with ``SeedSequence.spawn`` into one child stream each for the
segment plan, emission noise, spikes and dropouts, so changing one
disturbance setting leaves the other draws untouched.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .core import NORMAL, NUM_CLASSES, AlertGateError, LabeledFrame, ProbabilityFrame

DROPOUT_BLEND = 0.9
SCENARIOS = ("clean", "spiky", "occluded", "confusable", "mixed")
# confounder classes and the unsafe classes they get mistaken for
CONFUSION_PAIRS = ((3, 14), (14, 3), (5, 15), (15, 5))


class InvalidSpec(AlertGateError):
    pass


@dataclass(frozen=True)
class Segment:
    class_id: int
    min_len: int
    max_len: int
    weight: float = 1.0


@dataclass(frozen=True)
class StreamSpec:
    """Generative description of one labeled stream.

    ``segments`` must contain exactly one Normal entry (its weight is
    ignored); labels alternate Normal and weighted draws among the others.
    Rates are per-frame onset probabilities.
    """

    seed: int
    duration_frames: int
    segments: tuple[Segment, ...]
    name: str = "custom"
    fps: float = 25.0
    mu_true: float = 6.0
    mu_other: float = 0.0
    sigma: float = 0.5
    spike_rate: float = 0.0
    spike_len: tuple[int, int] = (1, 1)
    spike_confusions: tuple[tuple[int, int], ...] = ()
    # if set, frames whose label has no confusion pair never spike
    confusions_only: bool = False
    dropout_rate: float = 0.0
    dropout_len: tuple[int, int] = (1, 1)

    def __post_init__(self) -> None:
        if self.duration_frames < 1:
            raise InvalidSpec("duration_frames must be >= 1")
        if not self.fps > 0:
            raise InvalidSpec("fps must be positive")
        if self.sigma < 0:
            raise InvalidSpec("sigma must be >= 0")
        for name in ("spike_rate", "dropout_rate"):
            r = getattr(self, name)
            if not 0.0 <= r <= 1.0:
                raise InvalidSpec(f"{name} must be in [0, 1]")
        for name in ("spike_len", "dropout_len"):
            lo, hi = getattr(self, name)
            if not 1 <= lo <= hi:
                raise InvalidSpec(f"{name} needs 1 <= min <= max")
        normal = [s for s in self.segments if s.class_id == NORMAL]
        behaviors = [s for s in self.segments if s.class_id != NORMAL]
        if len(normal) != 1:
            raise InvalidSpec("segments need exactly one Normal entry")
        if not behaviors:
            raise InvalidSpec("segments need at least one behavior class")
        for s in self.segments:
            if not 1 <= s.class_id <= NUM_CLASSES:
                raise InvalidSpec(f"unknown class {s.class_id}")
            if not 1 <= s.min_len <= s.max_len:
                raise InvalidSpec(f"class {s.class_id}: need 1 <= min_len <= max_len")
            if s.weight < 0:
                raise InvalidSpec(f"class {s.class_id}: negative weight")
        if sum(s.weight for s in behaviors) <= 0:
            raise InvalidSpec("behavior weights must have a positive sum")
        for a, b in self.spike_confusions:
            if not (1 <= a <= NUM_CLASSES and 1 <= b <= NUM_CLASSES) or b == a:
                raise InvalidSpec(f"bad confusion pair ({a}, {b})")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "StreamSpec":
        d = dict(d)
        try:
            d["segments"] = tuple(Segment(**s) for s in d["segments"])
            for key in ("spike_len", "dropout_len"):
                if key in d:
                    d[key] = tuple(d[key])
            if "spike_confusions" in d:
                d["spike_confusions"] = tuple(tuple(p) for p in d["spike_confusions"])
            return cls(**d)
        except (KeyError, TypeError) as exc:
            raise InvalidSpec(f"malformed stream spec: {exc}") from None


@dataclass
class DisturbancePlan:
    spike_onsets: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    dropout_onsets: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))


def _child_rngs(seed: int) -> list[np.random.Generator]:
    seqs = np.random.SeedSequence(seed).spawn(4)
    return [np.random.Generator(np.random.PCG64(s)) for s in seqs]


def _labels(spec: StreamSpec, rng: np.random.Generator) -> np.ndarray:
    normal = next(s for s in spec.segments if s.class_id == NORMAL)
    behaviors = [s for s in spec.segments if s.class_id != NORMAL]
    weights = np.array([s.weight for s in behaviors], dtype=float)
    weights /= weights.sum()
    out = np.empty(spec.duration_frames, dtype=np.int64)
    t = 0
    use_normal = True
    while t < spec.duration_frames:
        seg = normal if use_normal else behaviors[rng.choice(len(behaviors), p=weights)]
        length = int(rng.integers(seg.min_len, seg.max_len + 1))
        out[t : t + length] = seg.class_id
        t += length
        use_normal = not use_normal
    return out


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def simulate_arrays(spec: StreamSpec) -> tuple[np.ndarray, np.ndarray, DisturbancePlan]:
    """Labels (n,), probabilities (n, 17) and the disturbance onsets."""
    seg_rng, noise_rng, spike_rng, drop_rng = _child_rngs(spec.seed)
    n = spec.duration_frames
    labels = _labels(spec, seg_rng)

    logits = np.full((n, NUM_CLASSES), spec.mu_other, dtype=float)
    logits[np.arange(n), labels - 1] = spec.mu_true
    noise = noise_rng.standard_normal((n, NUM_CLASSES))
    if spec.sigma > 0:
        logits += spec.sigma * noise
    probs = _softmax(logits)

    spike_on = spike_rng.random(n) < spec.spike_rate
    spike_lens = spike_rng.integers(spec.spike_len[0], spec.spike_len[1] + 1, size=n)
    spike_pick = spike_rng.random(n)
    for t in np.flatnonzero(spike_on):
        true = int(labels[t])
        choices = [b for a, b in spec.spike_confusions if a == true]
        if not choices:
            if spec.confusions_only:
                continue
            choices = [c for c in range(2, NUM_CLASSES + 1) if c != true]
        target = choices[int(spike_pick[t] * len(choices))]
        for u in range(t, min(n, t + int(spike_lens[t]))):
            top = int(np.argmax(probs[u]))
            j = target - 1
            if top != j:
                probs[u, top], probs[u, j] = probs[u, j], probs[u, top]

    drop_on = drop_rng.random(n) < spec.dropout_rate
    drop_lens = drop_rng.integers(spec.dropout_len[0], spec.dropout_len[1] + 1, size=n)
    dropped = np.zeros(n, dtype=bool)
    for t in np.flatnonzero(drop_on):
        dropped[t : t + int(drop_lens[t])] = True
    probs[dropped] = (1.0 - DROPOUT_BLEND) * probs[dropped] + DROPOUT_BLEND / NUM_CLASSES

    return labels, probs, DisturbancePlan(spike_on, drop_on)


def simulate_stream(spec: StreamSpec) -> tuple[list[LabeledFrame], list[ProbabilityFrame]]:
    labels, probs, _ = simulate_arrays(spec)
    label_frames = [LabeledFrame(t, int(y)) for t, y in enumerate(labels.tolist())]
    prob_frames = [ProbabilityFrame(t, tuple(row)) for t, row in enumerate(probs.tolist())]
    return label_frames, prob_frames


def default_segments(confounder_weight: float = 1.0) -> tuple[Segment, ...]:
    segs = [Segment(NORMAL, 50, 250, 0.0)]
    for c in range(2, NUM_CLASSES + 1):
        w = confounder_weight if c in (3, 5, 14, 15) else 1.0
        segs.append(Segment(c, 75, 250, w))
    return tuple(segs)


def scenario_suite(seed: int, fps: float = 25.0, minutes: float = 5.0) -> list[StreamSpec]:
    """The five named stress scenarios, in fixed order."""
    n = int(round(minutes * 60 * fps))
    base = StreamSpec(seed=seed, duration_frames=n, segments=default_segments(), fps=fps)
    return [
        replace(base, name="clean"),
        replace(base, name="spiky", sigma=0.8, spike_rate=0.02, spike_len=(1, 8)),
        replace(base, name="occluded", dropout_rate=0.01, dropout_len=(1, 6)),
        replace(
            base,
            name="confusable",
            segments=default_segments(3.0),
            spike_rate=0.05,
            spike_len=(1, 10),
            spike_confusions=CONFUSION_PAIRS,
            confusions_only=True,
        ),
        replace(
            base,
            name="mixed",
            segments=default_segments(2.0),
            sigma=0.8,
            spike_rate=0.015,
            spike_len=(1, 8),
            spike_confusions=CONFUSION_PAIRS,
            dropout_rate=0.005,
            dropout_len=(1, 4),
        ),
    ]


def get_scenario(name: str, seed: int, fps: float = 25.0) -> StreamSpec:
    for spec in scenario_suite(seed, fps):
        if spec.name == name:
            return spec
    raise InvalidSpec(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
