"""Post-hoc grouping of the 17 source classes into alert categories."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .core import (
    CLASS_NAMES,
    NORMAL,
    NUM_CLASSES,
    AlertEvent,
    InvalidConfig,
    LabeledFrame,
    ProbabilityFrame,
)

PRESETS = {
    "deployment-groups": "deployment_groups.json",
    "no-confounders": "no_confounders.json",
}


@dataclass(frozen=True)
class ClassMap:
    """Total map from source class id to target id.

    ``targets[i]`` is the target of source class ``i + 1``; ``names[j]`` names
    target ``j + 1``. Target 1 is the single non-alerting category and
    Normal always maps to it.
    """

    targets: tuple[int, ...]
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.targets) != NUM_CLASSES:
            raise InvalidConfig(f"class map must cover {NUM_CLASSES} source classes")
        n = len(self.names)
        if any(not 1 <= t <= n for t in self.targets):
            raise InvalidConfig("class map target id out of range")
        if self.targets[NORMAL - 1] != 1:
            raise InvalidConfig("Normal must map to the non-alerting target (id 1)")

    @property
    def num_targets(self) -> int:
        return len(self.names)

    def __getitem__(self, source: int) -> int:
        return self.targets[source - 1]

    @classmethod
    def identity(cls) -> "ClassMap":
        return cls(tuple(range(1, NUM_CLASSES + 1)), tuple(CLASS_NAMES.values()))

    @classmethod
    def from_dict(cls, d: dict) -> "ClassMap":
        """Build a map from the JSON file layout.

        Targets given as category names are numbered with the non-alerting
        categories first (merged into id 1), then in order of the smallest
        source id that maps to them. Targets given as integers are taken as
        literal class ids and keep the source class names.
        """
        raw = d["targets"]
        try:
            src = {int(k): v for k, v in raw.items()}
        except (TypeError, ValueError) as exc:
            raise InvalidConfig(f"bad source id in class map: {exc}") from None
        if sorted(src) != list(range(1, NUM_CLASSES + 1)):
            raise InvalidConfig(f"class map must list every source id 1..{NUM_CLASSES} exactly once")
        values = [src[i] for i in range(1, NUM_CLASSES + 1)]
        non_alerting = list(d.get("non_alerting", []))

        if all(isinstance(v, int) and not isinstance(v, bool) for v in values):
            if non_alerting and set(non_alerting) != {NORMAL}:
                raise InvalidConfig("integer class maps only support Normal (1) as non-alerting")
            return cls(tuple(values), tuple(CLASS_NAMES.values()))
        if not all(isinstance(v, str) for v in values):
            raise InvalidConfig("class map targets must be all names or all integer ids")

        if values[NORMAL - 1] not in non_alerting:
            raise InvalidConfig("the category Normal maps to must be listed as non-alerting")
        unknown = set(non_alerting) - set(values)
        if unknown:
            raise InvalidConfig(f"non-alerting categories not used by any class: {sorted(unknown)}")
        ids: dict[str, int] = {name: 1 for name in non_alerting}
        names = [" / ".join(non_alerting)]
        for v in values:
            if v not in ids:
                ids[v] = len(names) + 1
                names.append(v)
        return cls(tuple(ids[v] for v in values), tuple(names))

    def to_dict(self) -> dict:
        return {
            "targets": {str(i + 1): self.names[t - 1] for i, t in enumerate(self.targets)},
            "non_alerting": [self.names[0]],
        }


def load_map(path_or_preset: str | Path) -> ClassMap:
    """Load a map file, or a bundled preset by name."""
    key = str(path_or_preset)
    if key in PRESETS:
        text = resources.files("alertgate.presets").joinpath(PRESETS[key]).read_text(encoding="utf-8")
    else:
        text = Path(path_or_preset).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{key}: invalid JSON: {exc}") from None
    return ClassMap.from_dict(data)


def no_confounders_map() -> ClassMap:
    """Absorb the confounder classes into the unsafe classes they resemble.

    Grooming (14) becomes phone talking on the right (3) and control-panel
    use (15) becomes texting on the right (5); everything else is unchanged.
    """
    targets = list(range(1, NUM_CLASSES + 1))
    targets[14 - 1] = 3
    targets[15 - 1] = 5
    return ClassMap(tuple(targets), tuple(CLASS_NAMES.values()))


def deployment_groups_map() -> ClassMap:
    return load_map("deployment-groups")


def apply_map_frames(frames: Iterable[ProbabilityFrame], cmap: ClassMap) -> list[ProbabilityFrame]:
    out = []
    n = cmap.num_targets
    for f in frames:
        buckets: list[list[float]] = [[] for _ in range(n)]
        for p, tgt in zip(f.probs, cmap.targets):
            buckets[tgt - 1].append(p)
        out.append(ProbabilityFrame(f.t, tuple(math.fsum(b) for b in buckets)))
    return out


def apply_map_labels(labels: Iterable[LabeledFrame], cmap: ClassMap) -> list[LabeledFrame]:
    return [LabeledFrame(lf.t, cmap[lf.label]) for lf in labels]


def apply_map_events(events: Sequence[AlertEvent], cmap: ClassMap) -> list[AlertEvent]:
    """Relabel events and merge same-target neighbours that touch or overlap.

    Events whose class maps to the non-alerting target are dropped.
    """
    relabeled = sorted(
        ((cmap[e.class_id], e.t_start, e.t_end) for e in events if cmap[e.class_id] != 1),
        key=lambda x: (x[1], x[2]),
    )
    merged: list[list[int]] = []
    for c, s, e in relabeled:
        if merged and merged[-1][0] == c and s <= merged[-1][2] + 1:
            merged[-1][2] = max(merged[-1][2], e)
        else:
            merged.append([c, s, e])
    return [AlertEvent(c, s, e) for c, s, e in merged]
