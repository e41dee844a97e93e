import math
from dataclasses import replace

import numpy as np
import pytest

from alertgate.baselines import frame_only_alerts
from alertgate.core import validate_frame
from alertgate.events import gt_events_from_labels
from alertgate.simulate import (
    CONFUSION_PAIRS,
    SCENARIOS,
    InvalidSpec,
    Segment,
    StreamSpec,
    default_segments,
    get_scenario,
    scenario_suite,
    simulate_arrays,
    simulate_stream,
)


def quiet_spec(**kw):
    base = dict(seed=3, duration_frames=3000, segments=default_segments(), sigma=0.0, mu_true=4.0, mu_other=0.0)
    base.update(kw)
    return StreamSpec(**base)


def test_noise_free_closed_form():
    labels, frames = simulate_stream(quiet_spec())
    expected = math.exp(4) / (math.exp(4) + 16)
    assert expected == pytest.approx(0.7734, abs=1e-4)
    for lf, f in zip(labels, frames):
        assert f.argmax() == lf.label
        assert f.prob(lf.label) == pytest.approx(expected, abs=1e-12)


def test_perfect_classifier_reconstructs_gt():
    for seed in range(5):
        labels, frames = simulate_stream(quiet_spec(seed=seed))
        assert frame_only_alerts(frames) == gt_events_from_labels(labels)


def test_deterministic_bit_identical():
    spec = get_scenario("mixed", 11)
    l1, p1, _ = simulate_arrays(spec)
    l2, p2, _ = simulate_arrays(spec)
    assert np.array_equal(l1, l2)
    assert p1.tobytes() == p2.tobytes()
    assert simulate_stream(spec) == simulate_stream(spec)
    _, p3, _ = simulate_arrays(replace(spec, seed=12))
    assert p1.tobytes() != p3.tobytes()


@pytest.mark.parametrize("name", SCENARIOS)
def test_every_frame_valid(name):
    labels, frames = simulate_stream(get_scenario(name, 5))
    assert len(frames) == 7500
    assert [lf.t for lf in labels] == list(range(7500))
    for f in frames:
        validate_frame(f)


def test_suite_shape():
    suite = scenario_suite(0)
    assert [s.name for s in suite] == list(SCENARIOS)
    assert len(suite) == 5
    assert all(s.duration_frames == 5 * 60 * 25 and s.fps == 25.0 for s in suite)
    clean = suite[0]
    assert clean.spike_rate == 0 and clean.dropout_rate == 0
    conf = get_scenario("confusable", 0)
    for pair in ((3, 14), (14, 3), (5, 15), (15, 5)):
        assert pair in conf.spike_confusions
    assert conf.confusions_only
    with pytest.raises(InvalidSpec):
        get_scenario("nope", 0)


def test_spike_rate_within_three_standard_errors():
    n = 100_000
    rate = 0.02
    spec = quiet_spec(duration_frames=n, spike_rate=rate, spike_len=(1, 3), seed=77)
    _, _, plan = simulate_arrays(spec)
    freq = plan.spike_onsets.mean()
    se = math.sqrt(rate * (1 - rate) / n)
    assert abs(freq - rate) <= 3 * se


def test_spikes_swap_in_a_confusable_class():
    spec = quiet_spec(
        spike_rate=0.05,
        spike_len=(1, 1),
        spike_confusions=CONFUSION_PAIRS,
        confusions_only=True,
        segments=(Segment(1, 20, 40, 0), Segment(14, 50, 80, 1.0)),
    )
    labels, probs, plan = simulate_arrays(spec)
    hit = np.flatnonzero(plan.spike_onsets & (labels == 14))
    assert len(hit) > 0
    assert all(int(np.argmax(probs[t])) + 1 == 3 for t in hit)
    normal_onsets = np.flatnonzero(plan.spike_onsets & (labels == 1))
    assert all(int(np.argmax(probs[t])) + 1 == 1 for t in normal_onsets)


def test_dropout_flattens_toward_uniform():
    spec = quiet_spec(dropout_rate=1.0, dropout_len=(1, 1))
    labels, probs, _ = simulate_arrays(spec)
    clean = math.exp(4) / (math.exp(4) + 16)
    assert probs[0, labels[0] - 1] == pytest.approx(0.1 * clean + 0.9 / 17)


@pytest.mark.parametrize(
    "kw",
    [
        dict(duration_frames=0),
        dict(sigma=-1.0),
        dict(spike_rate=1.5),
        dict(dropout_len=(3, 2)),
        dict(segments=(Segment(2, 10, 20),)),
        dict(segments=(Segment(1, 10, 20), Segment(2, 10, 20, 0.0))),
        dict(spike_confusions=((3, 3),)),
    ],
)
def test_invalid_specs(kw):
    with pytest.raises(InvalidSpec):
        quiet_spec(**kw)


def test_spec_dict_round_trip():
    spec = get_scenario("mixed", 9)
    assert StreamSpec.from_dict(spec.to_dict()) == spec
