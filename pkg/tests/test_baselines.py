import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alertgate.baselines import (
    EmaConfig,
    MajorityConfig,
    ema_alerts,
    ema_probabilities,
    frame_only_alerts,
    majority_vote_alerts,
)
from alertgate.core import AlertEvent, GateConfig, InvalidConfig, NonMonotonicTime, ProbabilityFrame
from alertgate.gate import run_gate

from oracles import random_stream, ref_frame_only


def hard(t, c, p=0.9):
    probs = [0.0] * 17
    probs[c - 1] = p
    probs[0 if c != 1 else 1] += 1.0 - p
    return ProbabilityFrame(t, tuple(probs))


def stream_of(labels, p=0.9):
    return [hard(t, c, p) for t, c in enumerate(labels)]


def test_frame_only_examples():
    assert frame_only_alerts(stream_of([1, 4, 4, 1])) == [AlertEvent(4, 1, 2)]
    assert frame_only_alerts(stream_of([1, 1, 1])) == []
    assert frame_only_alerts(stream_of([4, 1, 4, 1])) == [AlertEvent(4, 0, 0), AlertEvent(4, 2, 2)]
    assert frame_only_alerts(stream_of([4, 7, 7])) == [AlertEvent(4, 0, 0), AlertEvent(7, 1, 2)]


def test_frame_only_rejects_time_reversal():
    with pytest.raises(NonMonotonicTime):
        frame_only_alerts([hard(1, 4), hard(0, 4)])


@pytest.mark.parametrize("seed", range(3))
def test_frame_only_matches_run_length_oracle(seed):
    rng = random.Random(seed)
    for _ in range(100):
        frames = random_stream(rng)
        assert frame_only_alerts(frames) == ref_frame_only(frames)


def dominant_stream(rng, n):
    # each frame's argmax holds more than half the mass
    out = []
    for t in range(n):
        c = rng.choice([1, 1, 2, 4, 5])
        out.append(hard(t, c, rng.uniform(0.51, 1.0)))
    return out


def test_frame_only_equals_gate_with_unit_window():
    cfg = GateConfig(tau=0.5, k=1, tau_off=0.5, m=1, cooldown=0)
    rng = random.Random(3)
    for _ in range(200):
        frames = dominant_stream(rng, rng.randint(0, 200))
        assert run_gate(frames, cfg) == frame_only_alerts(frames)


def test_majority_unanimous():
    events = majority_vote_alerts(stream_of([4, 4, 4]), MajorityConfig(3))
    assert events == [AlertEvent(4, 0, 2)]


def test_majority_tie_keeps_previous():
    # t=0: window [4] -> 4; t=1: [4, 7] tie -> keep 4; t=2: [7, 7] -> 7
    events = majority_vote_alerts(stream_of([4, 7, 7]), MajorityConfig(2))
    assert events == [AlertEvent(4, 0, 1), AlertEvent(7, 2, 2)]
    # initial output is Normal, so an early tie yields no alert
    events = majority_vote_alerts(stream_of([1, 4, 4]), MajorityConfig(2))
    assert events == [AlertEvent(4, 2, 2)]


def test_majority_smooths_single_spike():
    labels = [1] * 5 + [4] + [1] * 5
    assert majority_vote_alerts(stream_of(labels), MajorityConfig(5)) == []


def test_majority_window_one_equals_frame_only():
    rng = random.Random(11)
    for _ in range(200):
        frames = random_stream(rng)
        assert majority_vote_alerts(frames, MajorityConfig(1)) == frame_only_alerts(frames)


def test_ema_zero_lambda_is_thresholded_frame_only():
    rng = random.Random(5)
    for _ in range(50):
        frames = random_stream(rng)
        cfg = EmaConfig(lam=0.0, tau=0.6)
        filtered = [
            f if f.prob(f.argmax()) >= 0.6 else ProbabilityFrame(f.t, (1.0,) + (0.0,) * 16) for f in frames
        ]
        assert ema_alerts(frames, cfg) == frame_only_alerts(filtered)


def test_ema_recurrence_arithmetic():
    f0 = hard(0, 4, 1.0)
    f1 = ProbabilityFrame(1, (1.0,) + (0.0,) * 16)
    sm = ema_probabilities([f0, f1], 0.5)
    assert sm[0][3] == 1.0
    assert sm[1][3] == 0.5


def test_ema_constant_stream_fixed_point():
    v = hard(0, 6, 0.8).probs
    frames = [ProbabilityFrame(t, v) for t in range(30)]
    for p in ema_probabilities(frames, 0.8):
        assert p == pytest.approx(list(v), abs=1e-15)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 0.99))
def test_ema_stays_on_simplex(seed, lam):
    frames = random_stream(random.Random(seed), max_len=100)
    for p in ema_probabilities(frames, lam):
        assert abs(sum(p) - 1.0) <= 1e-9
        assert all(-1e-12 <= x <= 1 + 1e-12 for x in p)


def test_config_validation():
    with pytest.raises(InvalidConfig):
        MajorityConfig(0)
    with pytest.raises(InvalidConfig):
        EmaConfig(lam=1.0)
    with pytest.raises(InvalidConfig):
        EmaConfig(tau=0.0)


def test_single_sustained_episode_all_policies_agree():
    labels = [1] * 40 + [6] * 80 + [1] * 40
    frames = stream_of(labels, p=0.95)
    expected_class = {6}
    for events in (
        run_gate(frames, GateConfig()),
        frame_only_alerts(frames),
        majority_vote_alerts(frames, MajorityConfig()),
        ema_alerts(frames, EmaConfig()),
    ):
        assert len(events) == 1
        assert {e.class_id for e in events} == expected_class


def test_deterministic():
    frames = random_stream(random.Random(1))
    assert majority_vote_alerts(frames) == majority_vote_alerts(frames)
    assert ema_alerts(frames) == ema_alerts(frames)
