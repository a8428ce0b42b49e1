import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sociobadge.core import DyadRaster, ObservationWindow, rasterize
from sociobadge.preprocess import StrategySpec, apply_pipeline
from sociobadge.simgen import DegradationParams, degrade, generate_truth, random_scenario
from sociobadge.validity import ClassificationTable, classify, metrics, sweep, sweep_combined

from conftest import event_logs
from oracles import classify_loops, raster_rows


def raster(bits, roster=(1, 2), t0=0):
    bits = np.atleast_2d(np.array(bits, dtype=bool))
    return DyadRaster(tuple(roster), ObservationWindow(t0, t0 + bits.shape[1]), bits)


def test_classify_counts_each_cell():
    t = classify(raster([1, 1, 0, 0]), raster([1, 0, 1, 0]))
    assert (t.tp, t.fp, t.fn, t.tn) == (1, 1, 1, 1)


def test_classify_rejects_mismatch():
    with pytest.raises(ValueError, match="window"):
        classify(raster([1, 0]), raster([1, 0], t0=1))
    with pytest.raises(ValueError, match="roster"):
        classify(raster([1, 0]), raster([1, 0], roster=(1, 3)))


@given(st.integers(2, 5), st.integers(1, 40), st.data())
def test_classify_matches_double_loop(n, seconds, data):
    d = n * (n - 1) // 2
    draw = lambda: np.array(data.draw(st.lists(st.booleans(), min_size=d * seconds, max_size=d * seconds)),
                            dtype=bool).reshape(d, seconds)
    r, v = raster(draw(), range(n)), raster(draw(), range(n))
    t = classify(r, v)
    rows_r = {k: list(map(int, row)) for k, row in enumerate(r.matrix)}
    rows_v = {k: list(map(int, row)) for k, row in enumerate(v.matrix)}
    assert (t.tp, t.fp, t.fn, t.tn) == classify_loops(rows_r, rows_v)
    assert t.total == d * seconds
    swapped = classify(v, r)
    assert (swapped.fp, swapped.fn) == (t.fn, t.fp)
    assert metrics(swapped).accuracy == metrics(t).accuracy


@given(event_logs())
def test_self_classification_is_perfect(log):
    t = classify(rasterize(log), rasterize(log))
    assert t.fp == t.fn == 0
    assert metrics(t).accuracy == 1.0


def test_metrics_raw_counts():
    m = metrics(ClassificationTable(tp=25_326, fp=6_086, fn=25_674, tn=196_025))
    assert m.sensitivity == pytest.approx(0.497, abs=5e-4)
    assert m.specificity == pytest.approx(0.970, abs=5e-4)
    assert m.accuracy == pytest.approx(0.875, abs=5e-4)


def test_metrics_processed_counts():
    m = metrics(ClassificationTable(tp=33_446, fp=10_638, fn=17_554, tn=191_473))
    assert (m.sensitivity, m.specificity, m.accuracy) == pytest.approx((0.656, 0.947, 0.889), abs=5e-4)


def test_metrics_undefined_sensitivity():
    m = metrics(ClassificationTable(0, 0, 0, 10))
    assert m.sensitivity is None and m.sum_sens_spec is None
    assert m.specificity == 1 and m.accuracy == 1


@given(st.tuples(*[st.integers(0, 1000)] * 4), st.integers(2, 50))
def test_metrics_scale_free(cells, k):
    a = metrics(ClassificationTable(*cells))
    b = metrics(ClassificationTable(*(c * k for c in cells)))
    for x, y in zip(a.as_dict().values(), b.as_dict().values()):
        assert (x is None and y is None) or x == pytest.approx(y, rel=1e-12)


# ---- sweeps

@pytest.fixture(scope="module")
def synthetic():
    scenario = random_scenario(8, 1800, seed=4, min_dyad_gap_s=200)
    truth = generate_truth(scenario)
    measured, gaps = degrade(
        truth, DegradationParams(dropout_gap_mean_s=15, dropout_gap_max_s=40, dropout_rate_per_min=2,
                                 min_quantum_s=0, seed=9),
        return_gaps=True,
    )
    max_gap = max(e - s for g in gaps.values() for s, e in g)
    return truth, measured, max_gap


def test_sweep_zero_cutoff_equals_baseline(synthetic):
    truth, measured, _ = synthetic
    res = sweep(measured, truth, "min_duration", [0])
    assert res.points[0].table == res.baseline_table


def test_interpolate_sweep_recovers_truth(synthetic):
    truth, measured, max_gap = synthetic
    res = sweep(measured, truth, "interpolate", list(range(5, 200, 5)))
    for p in res.points:
        if p.value >= max_gap:
            assert p.metrics.accuracy == 1.0
        else:
            assert p.metrics.accuracy < 1.0
    assert res.best().value >= max_gap - 4


def test_sensitivity_monotone_in_sweeps(synthetic):
    truth, measured, _ = synthetic
    sens = sweep(measured, truth, "min_duration", list(range(0, 120, 10))).curve("sensitivity")
    assert all(b <= a for a, b in zip(sens, sens[1:]))
    sens = sweep(measured, truth, "interpolate", list(range(0, 120, 10))).curve("sensitivity")
    assert all(b >= a for a, b in zip(sens, sens[1:]))


def test_closure_sweep_flat_on_truth(synthetic):
    truth, _, _ = synthetic
    res = sweep(truth, truth, "triadic_closure", [1, 2, 3, 4])
    assert res.curve() == [1.0] * 4


def test_sweep_combined_empty_base_equals_sweep(synthetic):
    truth, measured, _ = synthetic
    a = sweep(measured, truth, "interpolate", [10, 30])
    b = sweep_combined(measured, truth, [], "interpolate", [10, 30])
    assert a == b


def test_sweep_combined_applies_base_first(synthetic):
    truth, measured, _ = synthetic
    base = [StrategySpec.interpolate(75)]
    res = sweep_combined(measured, truth, base, "min_duration", [0, 20, 55])
    pre = apply_pipeline(measured, base)
    expected = classify(rasterize(pre), rasterize(truth))
    assert res.points[0].table == expected
    assert res.baseline_table == classify(rasterize(measured), rasterize(truth))


def test_closure_after_min_duration_is_monotone(synthetic):
    truth, measured, _ = synthetic
    res = sweep_combined(measured, truth, [StrategySpec.min_duration(20)], "triadic_closure", [1, 2, 3, 4])
    covered = [p.table.tp + p.table.fp for p in res.points]
    assert all(b >= a for a, b in zip(covered, covered[1:]))


def test_sweep_values_must_increase(synthetic):
    truth, measured, _ = synthetic
    with pytest.raises(ValueError):
        sweep(measured, truth, "interpolate", [10, 10])
