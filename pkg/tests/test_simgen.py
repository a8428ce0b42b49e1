import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sociobadge.aggregate import aggregate_minutes
from sociobadge.core import ObservationWindow, normalize, InteractionEvent, rasterize
from sociobadge.preprocess import interpolate, triadic_closure
from sociobadge.simgen import (
    DegradationParams,
    GeometryParams,
    Group,
    Scenario,
    degrade,
    delete_events,
    detect_edge,
    generate_truth,
    random_scenario,
    reader_detects,
    simulate_nominations,
)
from sociobadge.validity import classify

from oracles import components_complete, raster_rows


# ---- geometry

@pytest.mark.parametrize(
    "distance, a, b, expected",
    [(1.0, 0, 0, True), (2.0, 0, 0, False), (1.0, 40, 0, False), (1.61, 32.6, 32.6, True)],
)
def test_detect_edge_thresholds(distance, a, b, expected):
    assert detect_edge(distance, a, b) is expected


def test_detect_edge_validates():
    with pytest.raises(ValueError):
        detect_edge(-1, 0, 0)
    with pytest.raises(ValueError):
        detect_edge(1, 0, 190)
    with pytest.raises(ValueError):
        GeometryParams(half_angle_deg=0)


def test_stochastic_detection_rate_near_range():
    rng = np.random.default_rng(0)
    hits = np.mean([detect_edge(1.61, 0, 0, rng=rng) for _ in range(4000)])
    # the mean threshold sits exactly at this distance
    assert abs(hits - 0.5) < 0.04
    assert all(detect_edge(0.0, 0, 0, rng=rng) for _ in range(100))


def test_reader_range_shrinks_when_occluded():
    assert reader_detects(40.0)
    assert not reader_detects(40.0, occluded=True)
    assert reader_detects(20.0, occluded=True)


# ---- ground truth

def test_group_expands_to_clique():
    scenario = Scenario(4, ObservationWindow(0, 100), (Group(frozenset({1, 2, 3}), 0, 60),))
    truth = generate_truth(scenario)
    assert [(e.dyad.a, e.dyad.b, e.start, e.end) for e in truth.events] == [
        (1, 2, 0, 60), (1, 3, 0, 60), (2, 3, 0, 60)]


def test_empty_schedule():
    assert generate_truth(Scenario(3, ObservationWindow(0, 10), ())).events == ()


def test_overlapping_membership_rejected():
    groups = (Group(frozenset({1, 2}), 0, 50), Group(frozenset({3, 4}), 5, 10), Group(frozenset({2, 3}), 40, 60))
    with pytest.raises(ValueError, match="badge 2"):
        generate_truth(Scenario(4, ObservationWindow(0, 100), groups))


@given(st.integers(2, 8), st.integers(0, 10_000))
def test_random_truth_is_union_of_cliques(n, seed):
    truth = generate_truth(random_scenario(n, 600, seed))
    assert components_complete(raster_rows(truth), truth.roster)
    assert triadic_closure(truth, 1) == truth


def test_min_dyad_gap_respected():
    truth = generate_truth(random_scenario(8, 3600, seed=2, min_dyad_gap_s=300))
    for evs in truth.by_dyad().values():
        assert all(b.start - a.end > 300 for a, b in zip(evs, evs[1:]))


# ---- degradation

def single_event_log(start, end, window=ObservationWindow(0, 500)):
    return normalize([InteractionEvent.make(1, 2, start, end)], [1, 2], window)


def test_quantization_only():
    truth = single_event_log(100, 103)
    got = degrade(truth, DegradationParams(dropout_rate_per_min=0, min_quantum_s=10))
    assert [(e.start, e.end) for e in got.events] == [(100, 110)]


def test_zero_max_gap_is_identity_up_to_quantization():
    truth = generate_truth(random_scenario(6, 900, seed=1))
    params = DegradationParams(dropout_gap_max_s=0, dropout_rate_per_min=5, min_quantum_s=0)
    assert degrade(truth, params) == truth


@given(st.integers(0, 1000), st.sampled_from([0, 1]))
def test_degrade_without_quantum_is_subset(seed, quantum):
    truth = generate_truth(random_scenario(6, 900, seed=seed))
    got = degrade(truth, DegradationParams(dropout_rate_per_min=3, min_quantum_s=quantum, seed=seed))
    t = classify(rasterize(got), rasterize(truth))
    assert t.fp == 0
    assert {e.dyad for e in got.events} <= {e.dyad for e in truth.events}


@given(st.integers(0, 1000))
def test_quantum_extension_is_only_source_of_false_positives(seed):
    truth = generate_truth(random_scenario(6, 900, seed=seed))
    q = 10
    got = degrade(truth, DegradationParams(dropout_rate_per_min=3, min_quantum_s=q, seed=seed))
    truth_rows = raster_rows(truth)
    for dyad, evs in got.by_dyad().items():
        row = truth_rows[(dyad.a, dyad.b)]
        t0 = got.window.t0
        for ev in evs:
            extra = [s - t0 for s in range(ev.start, ev.end) if not row[s - t0]]
            # an added second lies less than q seconds after a true second of the same pair
            assert all(any(row[max(0, i - q + 1):i]) for i in extra)


def test_degrade_is_deterministic():
    truth = generate_truth(random_scenario(8, 1200, seed=3))
    p = DegradationParams(seed=42)
    assert degrade(truth, p) == degrade(truth, p)
    assert degrade(truth, p) != degrade(truth, DegradationParams(seed=43))


def clipped_rounded_exp_mean(mean, max_gap):
    cdf = lambda v: 1 - math.exp(-v / mean) if v > 0 else 0.0
    total = 1 * cdf(1.5)
    total += sum(k * (cdf(k + 0.5) - cdf(k - 0.5)) for k in range(2, max_gap))
    total += max_gap * (1 - cdf(max_gap - 0.5))
    return total


def test_gap_statistics_match_requested_distribution():
    window = ObservationWindow(0, 20_000)
    events = [InteractionEvent.make(a, b, 0, 20_000) for a in range(1, 7) for b in range(a + 1, 7)]
    truth = normalize(events, range(1, 7), window)
    params = DegradationParams(dropout_gap_mean_s=20, dropout_gap_max_s=75, dropout_rate_per_min=0.3,
                               min_quantum_s=0, seed=5)
    _, gaps = degrade(truth, params, return_gaps=True)
    lengths = np.array([e - s for g in gaps.values() for s, e in g])
    expected_count = 0.3 * 20_000 / 60 * len(events)
    assert abs(len(lengths) - expected_count) < 4 * math.sqrt(expected_count)
    expected_mean = clipped_rounded_exp_mean(20, 75)
    assert abs(lengths.mean() - expected_mean) < 4 * lengths.std() / math.sqrt(len(lengths))
    assert lengths.min() >= 1 and lengths.max() <= 75


@pytest.mark.parametrize("seed", range(5))
def test_interpolation_restores_degraded_truth(seed):
    truth = generate_truth(random_scenario(9, 2400, seed=seed, min_dyad_gap_s=100))
    measured, gaps = degrade(truth, DegradationParams(dropout_gap_max_s=60, dropout_rate_per_min=2,
                                                      min_quantum_s=0, seed=seed), return_gaps=True)
    g = max((e - s for v in gaps.values() for s, e in v), default=0)
    assert interpolate(measured, g) == truth


def test_delete_events_keeps_subset():
    truth = generate_truth(random_scenario(8, 1200, seed=0))
    kept = delete_events(truth, 0.5, seed=1)
    assert set(kept.events) <= set(truth.events)
    assert delete_events(truth, 0.0, seed=1) == truth
    assert delete_events(truth, 1.0, seed=1).events == ()


# ---- nominations

def test_nominations_follow_probability():
    truth = generate_truth(random_scenario(30, 3600, seed=8))
    minutes = aggregate_minutes(truth)
    nom = simulate_nominations(minutes, -1.0, 0.0, seed=2)
    off_diag = ~np.eye(30, dtype=bool)
    rate = nom.ties[off_diag].mean()
    assert abs(rate - 1 / (1 + math.e)) < 0.04
    assert not nom.ties.diagonal().any()


def test_non_respondents_are_missing():
    truth = generate_truth(random_scenario(6, 600, seed=8))
    nom = simulate_nominations(aggregate_minutes(truth), 0.0, 0.1, seed=1, respondents=[1, 2])
    assert nom.value(3, 1) is None and nom.value(1, 3) is not None
