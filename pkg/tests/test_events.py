import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from alertgate.core import AlertEvent, LabeledFrame
from alertgate.events import (
    MatchResult,
    NoGtEvents,
    NonContiguousLabels,
    ZeroDuration,
    evaluate_events,
    false_alerts_per_min,
    fragmentation,
    greedy_match,
    gt_events_from_labels,
    time_to_detect,
    tiou,
)

from oracles import random_events, random_labels, ref_greedy_match, ref_gt_events, ref_tiou


def labels_of(ys, t0=0):
    return [LabeledFrame(t0 + i, y) for i, y in enumerate(ys)]


def test_gt_events_examples():
    assert gt_events_from_labels(labels_of([1, 4, 4, 4, 1, 7, 7])) == [AlertEvent(4, 1, 3), AlertEvent(7, 5, 6)]
    assert gt_events_from_labels(labels_of([1] * 10)) == []
    assert gt_events_from_labels(labels_of([4, 7])) == [AlertEvent(4, 0, 0), AlertEvent(7, 1, 1)]
    assert gt_events_from_labels([]) == []


def test_gt_events_need_contiguous_frames():
    with pytest.raises(NonContiguousLabels):
        gt_events_from_labels([LabeledFrame(0, 1), LabeledFrame(2, 4)])


def test_gt_events_expand_back_to_labels():
    rng = random.Random(0)
    for _ in range(200):
        labels = random_labels(rng)
        expanded = {lf.t: 1 for lf in labels}
        for ev in gt_events_from_labels(labels):
            for t in range(ev.t_start, ev.t_end + 1):
                expanded[t] = ev.class_id
        assert [expanded[lf.t] for lf in labels] == [lf.label for lf in labels]


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ((0, 9), (0, 9), 1.0),
        ((0, 9), (5, 14), Fraction(5, 15)),
        ((0, 4), (10, 14), 0.0),
        ((3, 3), (3, 3), 1.0),
        ((0, 4), (5, 9), 0.0),
    ],
)
def test_tiou_examples(a, b, expected):
    assert tiou(AlertEvent(2, *a), AlertEvent(2, *b)) == float(expected)


intervals = st.tuples(st.integers(0, 50), st.integers(0, 20)).map(lambda p: AlertEvent(2, p[0], p[0] + p[1]))


@given(intervals, intervals)
def test_tiou_properties(a, b):
    v = tiou(a, b)
    assert v == tiou(b, a)
    assert 0.0 <= v <= 1.0
    assert (v == 1.0) == (a == b)
    assert (v == 0.0) == (a.t_end < b.t_start or b.t_end < a.t_start)
    assert v == ref_tiou(a, b)


def test_greedy_examples():
    gt = [AlertEvent(4, 0, 9)]
    r = greedy_match([AlertEvent(4, 0, 9)], gt, 0.3)
    assert r.matches == [(0, 0, 1.0)]
    r = greedy_match([AlertEvent(7, 0, 9)], gt, 0.3)
    assert r.matches == [] and r.unmatched_pred == [0] and r.unmatched_gt == [0]
    preds = [AlertEvent(4, 0, 4), AlertEvent(4, 0, 7)]
    assert [tiou(p, gt[0]) for p in preds] == [0.5, 0.8]
    r = greedy_match(preds, gt, 0.3)
    assert r.matches == [(1, 0, 0.8)]
    assert r.unmatched_pred == [0]


def test_greedy_tie_prefers_earlier_gt_then_pred():
    pred = [AlertEvent(2, 5, 14)]
    gt = [AlertEvent(2, 10, 19), AlertEvent(2, 0, 9)]
    r = greedy_match(pred, gt, 0.3)
    assert r.matches == [(0, 1, tiou(pred[0], gt[1]))]


def test_greedy_eta_threshold_inclusive():
    r = greedy_match([AlertEvent(2, 0, 9)], [AlertEvent(2, 5, 14)], eta=1 / 3)
    assert len(r.matches) == 1
    r = greedy_match([AlertEvent(2, 0, 9)], [AlertEvent(2, 5, 14)], eta=0.34)
    assert r.matches == []


@pytest.mark.parametrize("seed", range(3))
def test_greedy_matches_enumeration_oracle(seed):
    rng = random.Random(seed)
    for _ in range(150):
        pred, gt = random_events(rng), random_events(rng)
        eta = rng.choice([0.1, 0.3, 0.5, 1 / 3, 1.0])
        r = greedy_match(pred, gt, eta)
        pairs, up, ug = ref_greedy_match(pred, gt, eta)
        assert {(i, j) for i, j, _ in r.matches} == pairs
        assert (r.unmatched_pred, r.unmatched_gt) == (up, ug)
        assert len(r.matches) + len(r.unmatched_pred) == len(pred)
        assert len(r.matches) + len(r.unmatched_gt) == len(gt)
        assert all(iou >= eta for *_, iou in r.matches)


def test_false_alerts_per_min():
    r = MatchResult(unmatched_pred=[0, 1, 2])
    assert false_alerts_per_min(r, 15000, 25) == pytest.approx(0.3, rel=1e-15)
    assert false_alerts_per_min(MatchResult(), 15000, 25) == 0.0
    r6 = MatchResult(unmatched_pred=list(range(6)))
    assert false_alerts_per_min(r6, 15000, 25) == pytest.approx(0.6, rel=1e-15)
    with pytest.raises(ZeroDuration):
        false_alerts_per_min(r, 0, 25)


@pytest.mark.parametrize("offset", [24, 0, -2])
def test_time_to_detect(offset):
    gt = [AlertEvent(3, 100, 200)]
    pred = [AlertEvent(3, 100 + offset, 200)]
    r = greedy_match(pred, gt)
    delays, mean = time_to_detect(r, pred, gt)
    assert delays == [offset] and mean == offset


def test_time_to_detect_without_matches():
    assert time_to_detect(MatchResult(), [], []) == ([], None)


def test_fragmentation():
    gt = [AlertEvent(5, 0, 99)]
    assert fragmentation([AlertEvent(5, 0, 20), AlertEvent(5, 30, 50), AlertEvent(5, 60, 99)], gt) == 3.0
    assert fragmentation([AlertEvent(5, 0, 99)], gt) == 1.0
    assert fragmentation([AlertEvent(5, 200, 300), AlertEvent(6, 0, 99)], gt) == 0.0
    with pytest.raises(NoGtEvents):
        fragmentation([], [])


def test_evaluate_events_perfect():
    gt = [AlertEvent(4, 10, 40), AlertEvent(9, 80, 120)]
    m, _ = evaluate_events(gt, gt, 1500, 25)
    assert (m.false_alerts_per_min, m.mean_time_to_detect, m.fragmentation) == (0.0, 0.0, 1.0)
    m, _ = evaluate_events([], gt, 1500, 25)
    assert m.false_alerts_per_min == 0.0 and m.mean_time_to_detect is None


def test_gt_events_oracle_random():
    rng = random.Random(42)
    for _ in range(200):
        labels = random_labels(rng)
        assert gt_events_from_labels(labels) == ref_gt_events(labels)
